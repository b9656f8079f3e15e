#include "mhdcm/dccm.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "mhdcm/errors.hpp"
#include "mhdcm/linalg.hpp"
#include "mhdcm/semantics.hpp"

namespace mhdcm {

namespace {

Eigen::MatrixXd sign_matrix(const Eigen::MatrixXd& m) {
  // sgn(0) = +1; unaryExpr keeps -0.0 on the +1 side as well.
  return m.unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
}

}  // namespace

ProjectionModel fit_dccm(const MultiModalDataset& train, int code_length, double ridge) {
  train.validate();
  const int m = train.feature_dim_x();
  const int p = train.feature_dim_y();
  const int c = train.c();
  if (c < 2) throw ConfigError("degenerate class structure: need at least 2 classes");

  int l = code_length;
  if (l <= 0) l = std::max(1, std::min({m, p, c - 1}));
  if (l > std::min(m, p))
    throw ConfigError("code length " + std::to_string(l) + " exceeds min(m, p) = " +
                      std::to_string(std::min(m, p)));
  if (l > c - 1)
    std::cerr << "warning: code length " << l << " exceeds the similarity rank " << (c - 1)
              << "; trailing eigenvalues will be numerically zero\n";

  const CenteredPair cp = center(train.x, train.y);
  const SemanticContext ctx = build_semantic_context(train.labels, train.class_counts);
  const GevProblem prob = build_gev(cp, ctx, ridge);
  GevSolution sol = solve_gev(prob, l);

  // Canonical scale: each projected, block-weighted modality has covariance
  // N I_L. The solver returns unit scale, so both sides grow by sqrt(N).
  const double root_n = std::sqrt(static_cast<double>(train.n()));

  ProjectionModel model;
  model.method = Method::dccm;
  model.w_x = root_n * sol.w_x;
  model.w_y = root_n * sol.w_y;
  model.x_mean = cp.x_mean;
  model.y_mean = cp.y_mean;
  model.eigenvalues = sol.eigenvalues;
  model.code_length = l;
  model.class_count = c;
  model.ridge_x = prob.ridge_x;
  model.ridge_y = prob.ridge_y;
  return model;
}

double objective_dccm(const ProjectionModel& model, const MultiModalDataset& train) {
  train.validate();
  if (train.feature_dim_x() != model.feature_dim_x() ||
      train.feature_dim_y() != model.feature_dim_y())
    throw ConfigError("dataset dims (" + std::to_string(train.feature_dim_x()) + ", " +
                      std::to_string(train.feature_dim_y()) + ") do not match model dims (" +
                      std::to_string(model.feature_dim_x()) + ", " +
                      std::to_string(model.feature_dim_y()) + ")");
  const SemanticContext ctx = build_semantic_context(train.labels, train.class_counts);
  const Eigen::MatrixXd x_prime = train.x.rowwise() - model.x_mean.transpose();
  const Eigen::MatrixXd y_prime = train.y.rowwise() - model.y_mean.transpose();
  const Eigen::MatrixXd codes_x = sign_matrix(ctx.apply_block_sqrt(x_prime * model.w_x));
  const Eigen::MatrixXd codes_y = sign_matrix(ctx.apply_block_sqrt(y_prime * model.w_y));
  return reconstruction_error(codes_x, codes_y, static_cast<double>(model.code_length), ctx);
}

}  // namespace mhdcm
