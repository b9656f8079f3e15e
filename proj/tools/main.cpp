#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mhdcm/dccm.hpp"
#include "mhdcm/dnccm.hpp"
#include "mhdcm/encode_eval.hpp"
#include "mhdcm/errors.hpp"
#include "mhdcm/model_io.hpp"
#include "mhdcm/run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommandArgs {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;  // flag order
  std::string model_path;
  std::string l_sweep;
};

// Every option lands in the overrides list as key=value so the precedence is
// uniform: defaults, then the config file, then explicit flags.
void add_common_options(CLI::App* cmd, CommandArgs& args) {
  cmd->add_option("--config", args.config_path, "flat key=value config file");
  const auto kv = [cmd, &args](const std::string& flag, const std::string& key,
                               const std::string& desc) {
    cmd->add_option(flag, desc)->each([&args, key](const std::string& v) {
      args.overrides.emplace_back(key, v);
    });
  };
  kv("--x", "x_path", "modality X CSV file");
  kv("--y", "y_path", "modality Y CSV file");
  kv("--label-column", "label_column", "name of the label column");
  kv("--method", "method", "dccm or dnccm");
  kv("-L,--code-length", "code_length", "projection pairs (dccm); 0 = min(m,p,c-1)");
  kv("-Q,--iterations", "iterations", "deflation iterations (dnccm); 0 = m+p");
  kv("--ridge", "ridge", "ridge added to the Gram diagonals; 'auto' for the default");
  kv("--split", "split_mode", "fraction, per_class or index_file");
  kv("--train-fraction", "train_fraction", "train fraction in (0,1)");
  kv("--per-class", "train_per_class", "training samples per class");
  kv("--index-file", "index_file", "file of original row indices for the training set");
  kv("--seed", "seed", "split seed");
  kv("--fusion", "fusion", "concat, sum, x_only or y_only");
  kv("--k", "k", "neighbor count for classification");
  kv("--threads", "threads", "evaluation threads");
  kv("--out", "out_dir", "run output directory");
  cmd->add_flag_callback("--hamming",
                         [&args] { args.overrides.emplace_back("distance", "hamming"); },
                         "classify on hash codes with Hamming distance");
  cmd->add_flag_callback("--force",
                         [&args] { args.overrides.emplace_back("force", "true"); },
                         "overwrite existing outputs");
}

mhdcm::RunConfig resolve_config(const CommandArgs& args) {
  mhdcm::RunConfig config;
  if (!args.config_path.empty()) mhdcm::load_config_file(config, args.config_path);
  for (const auto& [key, value] : args.overrides) mhdcm::apply_key_value(config, key, value);
  return config;
}

void require(const std::string& value, const char* what) {
  if (value.empty()) throw mhdcm::ConfigError(std::string("missing required option: ") + what);
}

void require_inputs(const mhdcm::RunConfig& config) {
  require(config.x_path, "--x");
  require(config.y_path, "--y");
  require(config.label_column, "--label-column");
  require(config.out_dir, "--out");
}

fs::path claim_output(const mhdcm::RunConfig& config, const fs::path& dir,
                      const std::string& name) {
  const fs::path path = dir / name;
  if (fs::exists(path) && !config.force)
    throw mhdcm::ConfigError("refusing to overwrite " + path.string() + " (pass --force)");
  return path;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// manifest.json accumulates one entry per command run into the directory.
void update_manifest(const mhdcm::RunConfig& config, const fs::path& dir,
                     const std::string& command, const std::vector<std::string>& outputs,
                     json extra = json::object()) {
  const fs::path path = dir / "manifest.json";
  json manifest = json::object();
  if (fs::exists(path)) {
    std::ifstream in(path);
    try {
      in >> manifest;
    } catch (const json::exception&) {
      manifest = json::object();
    }
  }
  json entry;
  entry["config_hash"] = hash_hex(mhdcm::config_hash(config));
  entry["seed"] = config.split.seed;
  entry["outputs"] = outputs;
  json cfg = json::object();
  std::istringstream canon(mhdcm::canonical_config(config));
  std::string line;
  while (std::getline(canon, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) cfg[line.substr(0, eq)] = line.substr(eq + 1);
  }
  entry["config"] = cfg;
  entry.update(extra);
  manifest[command] = entry;
  std::ofstream out(path);
  out << manifest.dump(2) << "\n";
}

std::pair<mhdcm::MultiModalDataset, mhdcm::MultiModalDataset> load_and_split(
    const mhdcm::RunConfig& config) {
  const mhdcm::MultiModalDataset ds =
      mhdcm::load_dataset(config.x_path, config.y_path, config.label_column);
  return mhdcm::split(ds, config.split);
}

mhdcm::ProjectionModel fit_model(const mhdcm::RunConfig& config,
                                 const mhdcm::MultiModalDataset& train) {
  if (config.method == mhdcm::Method::dccm)
    return mhdcm::fit_dccm(train, config.code_length, config.ridge);
  return mhdcm::fit_dnccm(train, config.iterations, config.ridge);
}

void write_trace(const mhdcm::ProjectionModel& model, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw mhdcm::ConfigError("cannot write " + path.string());
  char buf[32];
  if (model.method == mhdcm::Method::dccm) {
    out << "index,eigenvalue\n";
    for (int i = 0; i < model.code_length; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", model.eigenvalues(i));
      out << (i + 1) << "," << buf << "\n";
    }
  } else {
    out << "iteration,eigenvalue,residual\n";
    for (int i = 0; i < model.code_length; ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", model.eigenvalues(i));
      out << (i + 1) << "," << buf;
      std::snprintf(buf, sizeof(buf), "%.17g", model.residual_trace[i]);
      out << "," << buf << "\n";
    }
  }
}

json report_to_json(const mhdcm::EvalReport& report) {
  json j;
  j["accuracy"] = report.accuracy;
  j["n_train"] = report.n_train;
  j["n_test"] = report.n_test;
  j["k"] = report.k;
  j["fusion"] = mhdcm::fusion_name(report.fusion);
  j["distance"] = report.distance == mhdcm::DistanceMode::euclidean ? "euclidean" : "hamming";
  j["method"] = mhdcm::method_name(report.method);
  j["code_length"] = report.code_length;
  j["hamming_reconstruction_error"] = report.hamming_reconstruction_error;
  j["fisher_ratio"] = std::vector<double>(
      report.fisher_ratio.data(), report.fisher_ratio.data() + report.fisher_ratio.size());
  std::vector<std::vector<int>> confusion;
  for (Eigen::Index r = 0; r < report.confusion.rows(); ++r)
    confusion.emplace_back(report.confusion.row(r).begin(), report.confusion.row(r).end());
  j["confusion"] = confusion;
  return j;
}

void write_report(const mhdcm::EvalReport& report,
                  const std::vector<std::string>& class_names, const fs::path& txt_path,
                  const fs::path& json_path, const fs::path& confusion_path) {
  {
    std::ofstream out(txt_path);
    if (!out) throw mhdcm::ConfigError("cannot write " + txt_path.string());
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", report.accuracy);
    out << "accuracy=" << buf << "\n";
    out << "n_train=" << report.n_train << "\n";
    out << "n_test=" << report.n_test << "\n";
    out << "k=" << report.k << "\n";
    out << "fusion=" << mhdcm::fusion_name(report.fusion) << "\n";
    out << "distance="
        << (report.distance == mhdcm::DistanceMode::euclidean ? "euclidean" : "hamming") << "\n";
    out << "method=" << mhdcm::method_name(report.method) << "\n";
    out << "code_length=" << report.code_length << "\n";
    std::snprintf(buf, sizeof(buf), "%.17g", report.hamming_reconstruction_error);
    out << "hamming_reconstruction_error=" << buf << "\n";
    for (Eigen::Index j = 0; j < report.fisher_ratio.size(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", report.fisher_ratio(j));
      out << "fisher_ratio_" << (j + 1) << "=" << buf << "\n";
    }
  }
  {
    std::ofstream out(json_path);
    out << report_to_json(report).dump(2) << "\n";
  }
  {
    std::ofstream out(confusion_path);
    out << "true_class";
    for (const auto& name : class_names) out << ",predicted_" << name;
    out << "\n";
    for (Eigen::Index r = 0; r < report.confusion.rows(); ++r) {
      out << class_names[static_cast<std::size_t>(r)];
      for (Eigen::Index ccol = 0; ccol < report.confusion.cols(); ++ccol)
        out << "," << report.confusion(r, ccol);
      out << "\n";
    }
  }
}

int cmd_fit(const CommandArgs& args) {
  const mhdcm::RunConfig config = resolve_config(args);
  require_inputs(config);
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  const fs::path model_path = claim_output(config, dir, "model.mhdcm");
  const fs::path trace_path = claim_output(config, dir, "trace.csv");

  auto [train, test] = load_and_split(config);
  const mhdcm::ProjectionModel model = fit_model(config, train);
  mhdcm::save_model(model, model_path.string());
  write_trace(model, trace_path);

  json extra;
  extra["n_train"] = train.n();
  extra["n_test"] = test.n();
  extra["code_length"] = model.code_length;
  extra["ridge_x"] = model.ridge_x;
  extra["ridge_y"] = model.ridge_y;
  if (model.method == mhdcm::Method::dccm)
    extra["signed_objective"] = mhdcm::objective_dccm(model, train);
  else
    extra["signed_objective"] = model.residual_trace.back();
  update_manifest(config, dir, "fit", {"model.mhdcm", "trace.csv"}, extra);

  std::cout << "fit " << mhdcm::method_name(model.method) << ": n_train=" << train.n()
            << " L=" << model.code_length << " top_eigenvalue=" << model.eigenvalues(0)
            << "\nwrote " << model_path.string() << "\n";
  return 0;
}

int cmd_eval(const CommandArgs& args) {
  const mhdcm::RunConfig config = resolve_config(args);
  require_inputs(config);
  require(args.model_path, "--model");
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  const fs::path report_txt = claim_output(config, dir, "report.txt");
  const fs::path report_json = claim_output(config, dir, "report.json");
  const fs::path confusion_csv = claim_output(config, dir, "confusion.csv");

  auto [train, test] = load_and_split(config);
  const mhdcm::ProjectionModel model = mhdcm::load_model(args.model_path);
  const mhdcm::EvalReport report = mhdcm::evaluate(model, train, test, config.fusion, config.k,
                                                   config.distance, config.threads);
  write_report(report, train.class_names, report_txt, report_json, confusion_csv);
  update_manifest(config, dir, "eval", {"report.txt", "report.json", "confusion.csv"},
                  {{"accuracy", report.accuracy}, {"model", args.model_path}});

  std::cout << "eval " << mhdcm::method_name(report.method) << ": accuracy=" << report.accuracy
            << " n_test=" << report.n_test << "\nwrote " << report_txt.string() << "\n";
  return 0;
}

int cmd_visualize(const CommandArgs& args) {
  const mhdcm::RunConfig config = resolve_config(args);
  require_inputs(config);
  require(args.model_path, "--model");
  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  const fs::path train_csv = claim_output(config, dir, "train_projection.csv");
  const fs::path test_csv = claim_output(config, dir, "test_projection.csv");

  auto [train, test] = load_and_split(config);
  const mhdcm::ProjectionModel model = mhdcm::load_model(args.model_path);
  mhdcm::export_projection_trace(model, train, train_csv.string());
  mhdcm::export_projection_trace(model, test, test_csv.string());
  update_manifest(config, dir, "visualize",
                  {"train_projection.csv", "test_projection.csv"},
                  {{"model", args.model_path}});

  std::cout << "wrote " << train_csv.string() << " and " << test_csv.string() << "\n";
  return 0;
}

int cmd_sweep(const CommandArgs& args) {
  const mhdcm::RunConfig config = resolve_config(args);
  require_inputs(config);
  require(args.l_sweep, "--L-sweep");
  int lo = 0, hi = 0;
  if (std::sscanf(args.l_sweep.c_str(), "%d:%d", &lo, &hi) != 2 || lo < 1 || hi < lo)
    throw mhdcm::ConfigError("bad --L-sweep '" + args.l_sweep + "' (expected MIN:MAX)");

  const fs::path dir(config.out_dir);
  fs::create_directories(dir);
  const fs::path summary_path = claim_output(config, dir, "sweep_summary.csv");

  auto [train, test] = load_and_split(config);
  std::ofstream summary(summary_path);
  summary << "L,accuracy,hamming_reconstruction_error,fisher_ratio_max\n";
  std::vector<std::string> outputs{"sweep_summary.csv"};
  for (int l = lo; l <= hi; ++l) {
    mhdcm::RunConfig step = config;
    step.code_length = l;
    step.iterations = l;
    const fs::path subdir = dir / ("L" + std::to_string(l));
    fs::create_directories(subdir);
    const fs::path model_path = claim_output(config, subdir, "model.mhdcm");
    const fs::path report_txt = claim_output(config, subdir, "report.txt");
    const fs::path report_json = claim_output(config, subdir, "report.json");
    const fs::path confusion_csv = claim_output(config, subdir, "confusion.csv");

    const mhdcm::ProjectionModel model = fit_model(step, train);
    mhdcm::save_model(model, model_path.string());
    write_trace(model, claim_output(config, subdir, "trace.csv"));
    const mhdcm::EvalReport report = mhdcm::evaluate(model, train, test, step.fusion, step.k,
                                                     step.distance, step.threads);
    write_report(report, train.class_names, report_txt, report_json, confusion_csv);

    char buf[128];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g", l, report.accuracy,
                  report.hamming_reconstruction_error, report.fisher_ratio.maxCoeff());
    summary << buf << "\n";
    outputs.push_back(("L" + std::to_string(l)) + "/report.txt");
    std::cout << "L=" << l << " accuracy=" << report.accuracy << "\n";
  }
  update_manifest(config, dir, "sweep", outputs);
  std::cout << "wrote " << summary_path.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discriminative multi-modal projection fitting and evaluation"};
  app.require_subcommand(1);

  CommandArgs fit_args, eval_args, vis_args, sweep_args;
  CLI::App* fit = app.add_subcommand("fit", "fit a projection model");
  add_common_options(fit, fit_args);
  CLI::App* eval = app.add_subcommand("eval", "evaluate a fitted model");
  add_common_options(eval, eval_args);
  eval->add_option("--model", eval_args.model_path, "fitted model file");
  CLI::App* vis = app.add_subcommand("visualize", "export projection traces");
  add_common_options(vis, vis_args);
  vis->add_option("--model", vis_args.model_path, "fitted model file");
  CLI::App* sweep = app.add_subcommand("sweep", "fit and evaluate over a code-length range");
  add_common_options(sweep, sweep_args);
  sweep->add_option("--L-sweep", sweep_args.l_sweep, "code length range MIN:MAX");

  try {
    app.parse(argc, argv);
    if (fit->parsed()) return cmd_fit(fit_args);
    if (eval->parsed()) return cmd_eval(eval_args);
    if (vis->parsed()) return cmd_visualize(vis_args);
    if (sweep->parsed()) return cmd_sweep(sweep_args);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const mhdcm::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mhdcm::NumericError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
