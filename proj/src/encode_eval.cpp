#include "mhdcm/encode_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>
#include <utility>
#include <vector>

#include "mhdcm/errors.hpp"
#include "mhdcm/semantics.hpp"

namespace mhdcm {

namespace {

Eigen::MatrixXd sign_matrix(const Eigen::MatrixXd& m) {
  return m.unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
}

void check_dims(const ProjectionModel& model, const Eigen::MatrixXd& x,
                const Eigen::MatrixXd& y) {
  if (x.cols() != model.feature_dim_x() || y.cols() != model.feature_dim_y())
    throw ConfigError("data dims (" + std::to_string(x.cols()) + ", " +
                      std::to_string(y.cols()) + ") do not match model dims (" +
                      std::to_string(model.feature_dim_x()) + ", " +
                      std::to_string(model.feature_dim_y()) + ")");
  if (x.rows() != y.rows())
    throw ConfigError("row-count mismatch between modalities: " + std::to_string(x.rows()) +
                      " vs " + std::to_string(y.rows()));
}

// Prediction for one fused test row: majority vote among the k nearest
// training rows, distance ties resolved by train index, vote ties by the
// smallest class index.
int knn_predict(const Eigen::RowVectorXd& query, const Eigen::MatrixXd& train_z,
                const std::vector<int>& train_labels, int class_count, int k) {
  const int n = static_cast<int>(train_z.rows());
  std::vector<std::pair<double, int>> dist(n);
  for (int i = 0; i < n; ++i)
    dist[i] = {(train_z.row(i) - query).squaredNorm(), i};
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
  std::vector<int> votes(class_count, 0);
  for (int i = 0; i < k; ++i) votes[train_labels[dist[i].second]] += 1;
  int best = 0;
  for (int d = 1; d < class_count; ++d)
    if (votes[d] > votes[best]) best = d;
  return best;
}

}  // namespace

FusionRule fusion_from_name(const std::string& name) {
  if (name == "concat") return FusionRule::concat;
  if (name == "sum") return FusionRule::sum;
  if (name == "x_only") return FusionRule::x_only;
  if (name == "y_only") return FusionRule::y_only;
  throw ConfigError("unknown fusion rule '" + name +
                    "' (expected concat, sum, x_only or y_only)");
}

const char* fusion_name(FusionRule rule) {
  switch (rule) {
    case FusionRule::concat: return "concat";
    case FusionRule::sum: return "sum";
    case FusionRule::x_only: return "x_only";
    default: return "y_only";
  }
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> project(const ProjectionModel& model,
                                                    const Eigen::MatrixXd& x,
                                                    const Eigen::MatrixXd& y) {
  check_dims(model, x, y);
  Eigen::MatrixXd zx = (x.rowwise() - model.x_mean.transpose()) * model.w_x;
  Eigen::MatrixXd zy = (y.rowwise() - model.y_mean.transpose()) * model.w_y;
  return {std::move(zx), std::move(zy)};
}

HashCodes hash_codes(const Eigen::MatrixXd& zx, const Eigen::MatrixXd& zy) {
  return {sign_matrix(zx), sign_matrix(zy)};
}

Eigen::MatrixXd fuse(const Eigen::MatrixXd& zx, const Eigen::MatrixXd& zy, FusionRule rule) {
  if (zx.rows() != zy.rows())
    throw ConfigError("fusion row-count mismatch: " + std::to_string(zx.rows()) + " vs " +
                      std::to_string(zy.rows()));
  switch (rule) {
    case FusionRule::concat: {
      Eigen::MatrixXd out(zx.rows(), zx.cols() + zy.cols());
      out << zx, zy;
      return out;
    }
    case FusionRule::sum:
      if (zx.cols() != zy.cols())
        throw ConfigError("sum fusion needs equal column counts, got " +
                          std::to_string(zx.cols()) + " and " + std::to_string(zy.cols()));
      return zx + zy;
    case FusionRule::x_only:
      return zx;
    default:
      return zy;
  }
}

Eigen::VectorXd fisher_ratios(const Eigen::MatrixXd& z, const std::vector<int>& labels,
                              int class_count) {
  if (z.rows() != static_cast<Eigen::Index>(labels.size()))
    throw ConfigError("label count does not match rows");
  const Eigen::Index n = z.rows();
  const Eigen::RowVectorXd mean = z.colwise().mean();
  Eigen::MatrixXd class_mean = Eigen::MatrixXd::Zero(class_count, z.cols());
  Eigen::VectorXd class_n = Eigen::VectorXd::Zero(class_count);
  for (Eigen::Index i = 0; i < n; ++i) {
    class_mean.row(labels[i]) += z.row(i);
    class_n(labels[i]) += 1.0;
  }
  for (int d = 0; d < class_count; ++d)
    if (class_n(d) > 0.0) class_mean.row(d) /= class_n(d);

  Eigen::RowVectorXd between = Eigen::RowVectorXd::Zero(z.cols());
  Eigen::RowVectorXd within = Eigen::RowVectorXd::Zero(z.cols());
  for (int d = 0; d < class_count; ++d)
    between += class_n(d) * (class_mean.row(d) - mean).cwiseAbs2();
  for (Eigen::Index i = 0; i < n; ++i)
    within += (z.row(i) - class_mean.row(labels[i])).cwiseAbs2();

  Eigen::VectorXd ratio(z.cols());
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    ratio(j) = within(j) > 0.0 ? between(j) / within(j)
                               : std::numeric_limits<double>::infinity();
  return ratio;
}

EvalReport evaluate(const ProjectionModel& model, const MultiModalDataset& train,
                    const MultiModalDataset& test, FusionRule rule, int k,
                    DistanceMode distance, int threads) {
  train.validate();
  test.validate();
  check_dims(model, train.x, train.y);
  check_dims(model, test.x, test.y);
  if (train.c() != test.c())
    throw ConfigError("train and test class counts differ");
  if (test.n() < 1) throw ConfigError("empty test set");
  if (k < 1 || k > train.n())
    throw ConfigError("neighbor count " + std::to_string(k) + " outside [1, " +
                      std::to_string(train.n()) + "]");

  auto [train_zx, train_zy] = project(model, train.x, train.y);
  auto [test_zx, test_zy] = project(model, test.x, test.y);

  Eigen::MatrixXd train_fused, test_fused;
  if (distance == DistanceMode::hamming) {
    // Compare hash codes instead of projections. Squared Euclidean distance
    // on +-1 codes is 4x the Hamming distance, so the neighbor order is the
    // Hamming order.
    const HashCodes tr = hash_codes(train_zx, train_zy);
    const HashCodes te = hash_codes(test_zx, test_zy);
    train_fused = fuse(tr.codes_x, tr.codes_y, rule);
    test_fused = fuse(te.codes_x, te.codes_y, rule);
  } else {
    train_fused = fuse(train_zx, train_zy, rule);
    test_fused = fuse(test_zx, test_zy, rule);
  }

  const int c = train.c();
  const int n_test = test.n();
  std::vector<int> predicted(n_test);
  const auto worker = [&](int begin, int end) {
    for (int i = begin; i < end; ++i)
      predicted[i] = knn_predict(test_fused.row(i), train_fused, train.labels, c, k);
  };
  if (threads <= 1) {
    worker(0, n_test);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (n_test + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int begin = t * chunk;
      const int end = std::min(n_test, begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  EvalReport report;
  report.confusion = Eigen::MatrixXi::Zero(c, c);
  for (int i = 0; i < n_test; ++i) report.confusion(test.labels[i], predicted[i]) += 1;
  report.accuracy = static_cast<double>(report.confusion.trace()) / n_test;

  // Fisher ratios describe the fused real-valued training projections even
  // in hamming mode.
  report.fisher_ratio =
      fisher_ratios(fuse(train_zx, train_zy, rule), train.labels, c);

  const HashCodes test_codes = hash_codes(test_zx, test_zy);
  const SemanticContext test_ctx = build_semantic_context(test.labels, test.class_counts);
  report.hamming_reconstruction_error =
      reconstruction_error(test_codes.codes_x, test_codes.codes_y,
                           static_cast<double>(model.code_length), test_ctx);

  report.n_train = train.n();
  report.n_test = n_test;
  report.k = k;
  report.fusion = rule;
  report.distance = distance;
  report.method = model.method;
  report.code_length = model.code_length;
  return report;
}

void export_projection_trace(const ProjectionModel& model, const MultiModalDataset& ds,
                             const std::string& path) {
  auto [zx, zy] = project(model, ds.x, ds.y);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write projection trace: " + path);
  out << "sample_index,label";
  for (int j = 0; j < model.code_length; ++j) out << ",zx_" << (j + 1);
  for (int j = 0; j < model.code_length; ++j) out << ",zy_" << (j + 1);
  out << "\n";
  char buf[32];
  for (int i = 0; i < ds.n(); ++i) {
    out << ds.original_indices[i] << "," << ds.labels[i];
    for (int j = 0; j < model.code_length; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", zx(i, j));
      out << "," << buf;
    }
    for (int j = 0; j < model.code_length; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", zy(i, j));
      out << "," << buf;
    }
    out << "\n";
  }
  if (!out) throw ConfigError("short write to projection trace: " + path);
}

}  // namespace mhdcm
