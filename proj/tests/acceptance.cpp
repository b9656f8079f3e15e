// Acceptance suite: runs every release criterion at its pinned tolerance and
// prints one PASS/FAIL line per criterion. Exit code is the failure count.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "mhdcm/dccm.hpp"
#include "mhdcm/dnccm.hpp"
#include "mhdcm/encode_eval.hpp"
#include "mhdcm/errors.hpp"
#include "mhdcm/linalg.hpp"
#include "mhdcm/model_io.hpp"
#include "mhdcm/semantics.hpp"
#include "oracles.hpp"

using namespace mhdcm;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;
std::vector<std::string> notes;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int criterion, bool ok, const std::string& what) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
  if (!ok) ++failures;
}

bool expect(bool cond, const std::string& note) {
  if (!cond) notes.push_back(note);
  return cond;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double loo_nn_accuracy(const Eigen::MatrixXd& z, const std::vector<int>& labels) {
  const Eigen::Index n = z.rows();
  int correct = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index arg = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = (z.row(i) - z.row(j)).squaredNorm();
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    if (labels[static_cast<std::size_t>(arg)] == labels[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n);
}

// --- criterion 1: bundled two-class reproduction ---------------------------

void criterion_1() {
  const auto start = Clock::now();
  bool ok = true;
  std::string detail;
  try {
    const std::string data = MHDCM_DATA_DIR;
    const MultiModalDataset ds =
        load_dataset(data + "/iris2_x.csv", data + "/iris2_y.csv", "species");
    ok &= expect(ds.n() == 100, "bundled subset should have 100 samples");

    const ProjectionModel dccm = fit_dccm(ds);
    auto [zx, zy] = project(dccm, ds.x, ds.y);
    const Eigen::MatrixXd fused = fuse(zx, zy, FusionRule::sum);
    const double fisher_dccm =
        fisher_ratios(fused, ds.labels, ds.c()).maxCoeff();
    const double fisher_raw_x = fisher_ratios(ds.x, ds.labels, ds.c()).maxCoeff();
    const double fisher_raw_y = fisher_ratios(ds.y, ds.labels, ds.c()).maxCoeff();
    ok &= expect(fisher_dccm > fisher_raw_x && fisher_dccm > fisher_raw_y,
                 "fused fisher ratio must exceed both raw features");

    const Eigen::MatrixXd raw_concat = fuse(ds.x, ds.y, FusionRule::concat);
    const double acc_fused = loo_nn_accuracy(fused, ds.labels);
    const double acc_raw = loo_nn_accuracy(raw_concat, ds.labels);
    ok &= expect(acc_fused >= acc_raw, "fused leave-one-out accuracy below raw features");

    const ProjectionModel dnccm = fit_dnccm(ds);  // Q = m + p = 2
    auto [nx, ny] = project(dnccm, ds.x, ds.y);
    const double fisher_dnccm =
        fisher_ratios(fuse(nx, ny, FusionRule::sum), ds.labels, ds.c()).maxCoeff();
    ok &= expect(fisher_dnccm >= fisher_dccm - 1e-12,
                 "iterative fused fisher ratio below the canonical one");

    const double elapsed = seconds_since(start);
    ok &= expect(elapsed < 5.0, "runtime above 5 s");
    detail = "fisher raw (" + fmt(fisher_raw_x) + ", " + fmt(fisher_raw_y) + ") dccm " +
             fmt(fisher_dccm) + " dnccm " + fmt(fisher_dnccm) + "; loo raw " + fmt(acc_raw) +
             " fused " + fmt(acc_fused) + "; " + fmt(elapsed) + " s";
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  report(1, ok, "bundled two-class reproduction (" + detail + ")");
}

// --- criterion 2: eigenvalue solver vs dense pencil ------------------------

void criterion_2() {
  const auto start = Clock::now();
  bool ok = true;
  std::string detail;
  try {
    std::mt19937 rng(12002);
    double worst = 0.0;
    for (int round = 0; round < 50; ++round) {
      const int m = 1 + static_cast<int>(rng() % 10);
      const int p = 1 + static_cast<int>(rng() % std::min(10, 20 - m));
      const Eigen::MatrixXd gx = oracle::random_matrix(rng, m + p + 4, m);
      const Eigen::MatrixXd gy = oracle::random_matrix(rng, m + p + 4, p);
      GevProblem prob;
      prob.gram_x = gx.transpose() * gx;
      prob.gram_y = gy.transpose() * gy;
      prob.cross_xy = oracle::random_matrix(rng, m, p);
      prob.ridge_x = prob.ridge_y = (round % 3 == 0) ? 1e-6 : 0.0;

      const int l = std::min(m, p);
      const GevSolution sol = solve_gev(prob, l);

      Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(m + p, m + p);
      lhs.topRightCorner(m, p) = prob.cross_xy;
      lhs.bottomLeftCorner(p, m) = prob.cross_xy.transpose();
      Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m + p, m + p);
      rhs.topLeftCorner(m, m) = prob.gram_x;
      rhs.topLeftCorner(m, m).diagonal().array() += prob.ridge_x;
      rhs.bottomRightCorner(p, p) = prob.gram_y;
      rhs.bottomRightCorner(p, p).diagonal().array() += prob.ridge_y;
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> dense(lhs, rhs);
      const Eigen::VectorXd spectrum = dense.eigenvalues().reverse();
      const double scale = std::max(1.0, std::abs(spectrum(0)));
      for (int i = 0; i < l; ++i)
        worst = std::max(worst, std::abs(sol.eigenvalues(i) - spectrum(i)) / scale);
    }
    ok &= expect(worst < 1e-8, "eigenvalue mismatch " + fmt(worst));

    double margin = 0.0;
    for (int round = 0; round < 10; ++round) {
      const Eigen::MatrixXd gx = oracle::random_matrix(rng, 5, 1);
      const Eigen::MatrixXd gy = oracle::random_matrix(rng, 5, 1);
      GevProblem prob;
      prob.gram_x = gx.transpose() * gx;
      prob.gram_y = gy.transpose() * gy;
      prob.cross_xy = oracle::random_matrix(rng, 1, 1);
      const GevSolution sol = solve_gev(prob, 1);
      const double solved = sol.w_x(0, 0) * prob.cross_xy(0, 0) * sol.w_y(0, 0);
      double best = -1e300;
      for (int step = 0; step < 3600; ++step) {
        const double theta = 2.0 * M_PI * step / 3600.0;
        const double wx = std::sqrt(2.0 / prob.gram_x(0, 0)) * std::cos(theta);
        const double wy = std::sqrt(2.0 / prob.gram_y(0, 0)) * std::sin(theta);
        best = std::max(best, wx * prob.cross_xy(0, 0) * wy);
      }
      margin = std::min(margin, solved - best);
    }
    ok &= expect(margin >= -1e-6, "grid search beat the solver by " + fmt(-margin));

    const double elapsed = seconds_since(start);
    ok &= expect(elapsed < 30.0, "runtime above 30 s");
    detail = "50 pencils, worst rel err " + fmt(worst) + "; grid margin " + fmt(margin) +
             "; " + fmt(elapsed) + " s";
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  report(2, ok, "eigenvalue solver matches the dense pencil (" + detail + ")");
}

// --- criterion 3: matrix identities ----------------------------------------

void criterion_3() {
  bool ok = true;
  std::string detail;
  try {
    std::mt19937 rng(12003);
    double worst_sqrt = 0.0;
    for (int round = 0; round < 20; ++round) {
      const int n = 4 + static_cast<int>(rng() % 27);
      const auto counts = oracle::random_partition(rng, n);
      const Eigen::MatrixXd a = oracle::dense_block(counts);
      const Eigen::MatrixXd a_sqrt = oracle::dense_block_sqrt(counts);
      worst_sqrt = std::max(worst_sqrt, (a_sqrt * a_sqrt - a).cwiseAbs().maxCoeff());
    }
    ok &= expect(worst_sqrt < 1e-10, "block sqrt squared deviates by " + fmt(worst_sqrt));

    double worst_d0 = 0.0;
    for (int round = 0; round < 20; ++round) {
      const auto counts = oracle::random_partition(rng, 6 + round % 12);
      const MultiModalDataset ds =
          oracle::random_dataset(rng, counts, 1 + round % 4, 1 + (round + 2) % 4, 1.0);
      const CenteredPair cp = center(ds.x, ds.y);
      const auto ctx = build_semantic_context(ds.labels, ds.class_counts);
      const Eigen::MatrixXd a_sqrt = oracle::dense_block_sqrt(counts);
      const Eigen::MatrixXd s = oracle::dense_sign_similarity(ds.labels);
      const Eigen::MatrixXd dense =
          (a_sqrt * cp.x_prime).transpose() * s * (a_sqrt * cp.y_prime);
      const double scale = std::max(1.0, dense.cwiseAbs().maxCoeff());
      worst_d0 =
          std::max(worst_d0, (init_d0(cp, ctx) - dense).cwiseAbs().maxCoeff() / scale);
    }
    ok &= expect(worst_d0 < 1e-12, "factored initial objective deviates by " + fmt(worst_d0));
    detail = "sqrt identity err " + fmt(worst_sqrt) + "; factored-vs-dense err " + fmt(worst_d0);
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  report(3, ok, "matrix identities (" + detail + ")");
}

// --- criterion 4: downdate recurrence vs from-scratch evaluation ------------

void criterion_4() {
  bool ok = true;
  std::string detail;
  try {
    std::mt19937 rng(12004);
    double worst = 0.0;
    for (int round = 0; round < 10; ++round) {
      const int n = 8 + static_cast<int>(rng() % 13);
      const auto counts = oracle::random_partition(rng, n);
      const MultiModalDataset ds = oracle::random_dataset(rng, counts, 3, 3, 1.0);
      const CenteredPair cp = center(ds.x, ds.y);
      const auto ctx = build_semantic_context(ds.labels, ds.class_counts);
      DnccmDriver driver(cp, ctx, -1.0);

      const Eigen::MatrixXd a_sqrt = oracle::dense_block_sqrt(counts);
      const Eigen::MatrixXd gx = a_sqrt * cp.x_prime;
      const Eigen::MatrixXd gy = a_sqrt * cp.y_prime;
      Eigen::MatrixXd target = oracle::dense_sign_similarity(ds.labels);
      const auto sign_of = [](double v) { return v < 0.0 ? -1.0 : 1.0; };
      for (int t = 0; t < 5; ++t) {
        driver.iterate();
        const Eigen::MatrixXd cxt =
            (gx * driver.accumulated_w_x().col(t)).unaryExpr(sign_of);
        const Eigen::MatrixXd cyt =
            (gy * driver.accumulated_w_y().col(t)).unaryExpr(sign_of);
        target -= cxt * cyt.transpose();
        const Eigen::MatrixXd dense = gx.transpose() * target * gy;
        const double scale = std::max(1.0, dense.cwiseAbs().maxCoeff());
        worst = std::max(
            worst, (driver.objective_matrix() - dense).cwiseAbs().maxCoeff() / scale);
      }
    }
    ok &= expect(worst < 1e-10, "recurrence deviates by " + fmt(worst));
    detail = "10 datasets x 5 iterations, worst rel err " + fmt(worst);
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  report(4, ok, "downdate recurrence equals the from-scratch evaluation (" + detail + ")");
}

// --- criterion 5: constant-absorption identity ------------------------------

void criterion_5() {
  bool ok = true;
  std::string detail;
  try {
    std::mt19937 rng(12005);
    double worst = 0.0;
    for (int round = 0; round < 10; ++round) {
      // full rank without a ridge needs class count > feature dims
      const MultiModalDataset ds = oracle::random_dataset(rng, {4, 4, 3, 5}, 2, 2, 2.0);
      const ProjectionModel model = fit_dccm(ds, 2, 0.0);
      const double l = model.code_length;
      const double n = ds.n();

      const CenteredPair cp = center(ds.x, ds.y);
      const auto ctx = build_semantic_context(ds.labels, ds.class_counts);
      const Eigen::MatrixXd proj_x = ctx.apply_block_sqrt(cp.x_prime * model.w_x);
      const Eigen::MatrixXd proj_y = ctx.apply_block_sqrt(cp.y_prime * model.w_y);
      const Eigen::MatrixXd s = oracle::dense_sign_similarity(ds.labels);

      const double lhs = (proj_x * proj_y.transpose() - l * s).squaredNorm();
      const double constant = l * n * n + l * l * s.squaredNorm();
      const GevProblem prob = build_gev(cp, ctx, 0.0);
      const double rhs =
          -2.0 * l * (model.w_x.transpose() * prob.cross_xy * model.w_y).trace();
      worst = std::max(worst,
                       std::abs(lhs - constant - rhs) / std::max(1.0, std::abs(rhs)));
    }
    ok &= expect(worst < 1e-6, "identity off by relative " + fmt(worst));
    detail = "10 fitted models, worst rel err " + fmt(worst);
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  report(5, ok, "constant absorption in the relaxed objective (" + detail + ")");
}

// --- criterion 6: normalization constraints ---------------------------------

void criterion_6() {
  bool ok = true;
  std::string detail;
  try {
    std::mt19937 rng(12006);
    double worst_dccm = 0.0, worst_dnccm = 0.0;
    for (int round = 0; round < 5; ++round) {
      const auto counts = oracle::random_partition(rng, 14 + round);
      const MultiModalDataset ds = oracle::random_dataset(rng, counts, 3, 2, 1.5);
      const CenteredPair cp = center(ds.x, ds.y);
      const auto ctx = build_semantic_context(ds.labels, ds.class_counts);
      const Eigen::MatrixXd gx = ctx.apply_block_sqrt(cp.x_prime);
      const Eigen::MatrixXd gy = ctx.apply_block_sqrt(cp.y_prime);

      const ProjectionModel canon = fit_dccm(ds);
      Eigen::MatrixXd bx = gx.transpose() * gx;
      bx.diagonal().array() += canon.ridge_x;
      Eigen::MatrixXd by = gy.transpose() * gy;
      by.diagonal().array() += canon.ridge_y;
      const auto id = Eigen::MatrixXd::Identity(canon.code_length, canon.code_length);
      worst_dccm = std::max(
          worst_dccm, (canon.w_x.transpose() * bx * canon.w_x - ds.n() * id).cwiseAbs()
                              .maxCoeff() / ds.n());
      worst_dccm = std::max(
          worst_dccm, (canon.w_y.transpose() * by * canon.w_y - ds.n() * id).cwiseAbs()
                              .maxCoeff() / ds.n());

      const ProjectionModel iter = fit_dnccm(ds, 2);
      Eigen::MatrixXd bxi = gx.transpose() * gx;
      bxi.diagonal().array() += iter.ridge_x;
      Eigen::MatrixXd byi = gy.transpose() * gy;
      byi.diagonal().array() += iter.ridge_y;
      for (int t = 0; t < iter.code_length; ++t) {
        worst_dnccm = std::max(
            worst_dnccm, std::abs(iter.w_x.col(t).dot(bxi * iter.w_x.col(t)) - 1.0));
        worst_dnccm = std::max(
            worst_dnccm, std::abs(iter.w_y.col(t).dot(byi * iter.w_y.col(t)) - 1.0));
      }
    }
    ok &= expect(worst_dccm < 1e-6, "canonical constraint off by " + fmt(worst_dccm));
    ok &= expect(worst_dnccm < 1e-8, "unit normalization off by " + fmt(worst_dnccm));
    detail = "canonical err " + fmt(worst_dccm) + "; unit err " + fmt(worst_dnccm);
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  report(6, ok, "normalization constraints (" + detail + ")");
}

// --- criterion 7: determinism and invariances --------------------------------

void criterion_7() {
  bool ok = true;
  std::string detail;
  try {
    std::mt19937 rng(12007);
    const MultiModalDataset ds = oracle::random_dataset(rng, {6, 5, 7}, 3, 2, 1.5);

    ok &= expect(serialize_model(fit_dccm(ds)) == serialize_model(fit_dccm(ds)),
                 "canonical refit changed bytes");
    ok &= expect(serialize_model(fit_dnccm(ds, 3)) == serialize_model(fit_dnccm(ds, 3)),
                 "iterative refit changed bytes");

    const ProjectionModel model = fit_dccm(ds);
    ProjectionModel scaled = model;
    std::uniform_real_distribution<double> pos(0.3, 7.0);
    for (int j = 0; j < model.code_length; ++j) {
      scaled.w_x.col(j) *= pos(rng);
      scaled.w_y.col(j) *= pos(rng);
    }
    auto [zx, zy] = project(model, ds.x, ds.y);
    auto [sx, sy] = project(scaled, ds.x, ds.y);
    const HashCodes a = hash_codes(zx, zy);
    const HashCodes b = hash_codes(sx, sy);
    ok &= expect((a.codes_x - b.codes_x).cwiseAbs().maxCoeff() == 0.0 &&
                     (a.codes_y - b.codes_y).cwiseAbs().maxCoeff() == 0.0,
                 "hash codes moved under positive rescaling");

    MultiModalDataset shuffled = ds;
    int offset = 0;
    for (int nd : ds.class_counts) {
      std::vector<int> rows(nd);
      std::iota(rows.begin(), rows.end(), offset);
      std::shuffle(rows.begin(), rows.end(), rng);
      for (int i = 0; i < nd; ++i) {
        shuffled.x.row(offset + i) = ds.x.row(rows[i]);
        shuffled.y.row(offset + i) = ds.y.row(rows[i]);
        shuffled.original_indices[offset + i] = ds.original_indices[rows[i]];
      }
      offset += nd;
    }
    const ProjectionModel refit = fit_dccm(shuffled);
    const double dw = std::max((model.w_x - refit.w_x).cwiseAbs().maxCoeff(),
                               (model.w_y - refit.w_y).cwiseAbs().maxCoeff());
    ok &= expect(dw < 1e-8, "within-class permutation moved the fit by " + fmt(dw));
    detail = "refits bitwise equal; permutation shift " + fmt(dw);
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  report(7, ok, "determinism and invariances (" + detail + ")");
}

// --- criterion 8: degenerate input handling ----------------------------------

void criterion_8() {
  bool ok = true;
  std::string detail;
  try {
    // single-class data rejected by the CLI with exit code 2
    const fs::path dir = fs::temp_directory_path() / "mhdcm_acceptance_c8";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
      std::ofstream x(dir / "x.csv");
      x << "f,label\n1,a\n2,a\n3,a\n";
      std::ofstream y(dir / "y.csv");
      y << "g\n4\n5\n6\n";
    }
    const std::string cmd = std::string(MHDCM_CLI_PATH) + " fit --x " + (dir / "x.csv").string() +
                            " --y " + (dir / "y.csv").string() + " --label-column label --out " +
                            (dir / "run").string() + " > " + (dir / "log").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    ok &= expect(WEXITSTATUS(status) == 2,
                 "single-class fit exited with " + std::to_string(WEXITSTATUS(status)));

    // zero-variance feature survives through the default ridge
    std::mt19937 rng(12008);
    MultiModalDataset ds = oracle::random_dataset(rng, {6, 6}, 3, 2, 1.5);
    ds.x.col(1).setConstant(4.0);
    const ProjectionModel model = fit_dccm(ds);
    ok &= expect(model.eigenvalues.allFinite(), "zero-variance feature broke the fit");
    const EvalReport rep = evaluate(model, ds, ds, FusionRule::concat, 1);
    ok &= expect(rep.accuracy == 1.0, "self-evaluation after zero-variance fit not perfect");

    // sgn(0) = +1 on an exactly-zero projection
    const HashCodes codes = hash_codes(Eigen::MatrixXd::Zero(3, 2), Eigen::MatrixXd::Zero(3, 2));
    ok &= expect(codes.codes_x.minCoeff() == 1.0 && codes.codes_y.minCoeff() == 1.0,
                 "zero projection did not hash to +1");

    fs::remove_all(dir);
    detail = "single-class exit 2; ridge handles zero variance; sgn(0)=+1";
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("exception: ") + e.what();
  }
  report(8, ok, "degenerate input handling (" + detail + ")");
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  for (const auto& note : notes) std::printf("  note: %s\n", note.c_str());
  std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
