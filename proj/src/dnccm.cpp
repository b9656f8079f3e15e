#include "mhdcm/dnccm.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "mhdcm/dccm.hpp"
#include "mhdcm/errors.hpp"

namespace mhdcm {

namespace {

Eigen::VectorXd sign_vector(const Eigen::VectorXd& v) {
  return v.unaryExpr([](double x) { return x < 0.0 ? -1.0 : 1.0; });
}

}  // namespace

Eigen::MatrixXd init_d0(const CenteredPair& cp, const SemanticContext& ctx) {
  if (cp.x_prime.rows() != ctx.n() || cp.y_prime.rows() != ctx.n())
    throw ConfigError("centered data does not match the semantic context");
  const Eigen::MatrixXd gx = ctx.apply_block_sqrt(cp.x_prime);
  const Eigen::MatrixXd gy = ctx.apply_block_sqrt(cp.y_prime);
  const Eigen::MatrixXd ux = ctx.per_class_sums(gx);  // c x m
  const Eigen::MatrixXd uy = ctx.per_class_sums(gy);  // c x p
  const Eigen::VectorXd ox = gx.colwise().sum();
  const Eigen::VectorXd oy = gy.colwise().sum();
  return 2.0 * ux.transpose() * uy - ox * oy.transpose();
}

DnccmDriver::DnccmDriver(const CenteredPair& cp, const SemanticContext& ctx, double ridge)
    : cp_(cp),
      ctx_(ctx),
      ridge_x_(0.0),
      ridge_y_(0.0),
      solver_([&]() {
        // Gram matrices are fixed across iterations; build them (and the
        // whiteners) once.
        const Eigen::MatrixXd gx = ctx.apply_block_sqrt(cp.x_prime);
        const Eigen::MatrixXd gy = ctx.apply_block_sqrt(cp.y_prime);
        const Eigen::MatrixXd gram_x = gx.transpose() * gx;
        const Eigen::MatrixXd gram_y = gy.transpose() * gy;
        ridge_x_ = ridge < 0.0 ? default_ridge(gram_x) : ridge;
        ridge_y_ = ridge < 0.0 ? default_ridge(gram_y) : ridge;
        return GevSolver(gram_x, gram_y, ridge_x_, ridge_y_);
      }()),
      d_(init_d0(cp, ctx)),
      w_x_(cp.x_prime.cols(), 0),
      w_y_(cp.y_prime.cols(), 0),
      codes_x_(ctx.n(), 0),
      codes_y_(ctx.n(), 0) {}

DnccmStep DnccmDriver::solve_current() const {
  DnccmStep step;
  if (d_.cwiseAbs().maxCoeff() == 0.0) {
    step.w_x = Eigen::VectorXd::Zero(d_.rows());
    step.w_y = Eigen::VectorXd::Zero(d_.cols());
    step.lambda = 0.0;
    step.degenerate = true;
    return step;
  }
  const GevSolution sol = solver_.solve(d_, 1);
  step.w_x = sol.w_x.col(0);
  step.w_y = sol.w_y.col(0);
  step.lambda = sol.eigenvalues(0);
  return step;
}

void DnccmDriver::apply_downdate(const Eigen::VectorXd& w_x, const Eigen::VectorXd& w_y) {
  if (w_x.size() != d_.rows() || w_y.size() != d_.cols())
    throw ConfigError("downdate vectors do not match the objective matrix");
  const bool zero_step = w_x.isZero(0.0) && w_y.isZero(0.0);

  const Eigen::VectorXd code_x = sign_vector(ctx_.apply_block_sqrt(cp_.x_prime * w_x));
  const Eigen::VectorXd code_y = sign_vector(ctx_.apply_block_sqrt(cp_.y_prime * w_y));

  const int t = completed_steps();
  w_x_.conservativeResize(Eigen::NoChange, t + 1);
  w_y_.conservativeResize(Eigen::NoChange, t + 1);
  codes_x_.conservativeResize(Eigen::NoChange, t + 1);
  codes_y_.conservativeResize(Eigen::NoChange, t + 1);
  w_x_.col(t) = w_x;
  w_y_.col(t) = w_y;
  codes_x_.col(t) = code_x;
  codes_y_.col(t) = code_y;
  lambdas_.push_back(w_x.dot(d_ * w_y));
  residual_trace_.push_back(
      reconstruction_error(codes_x_, codes_y_, static_cast<double>(t + 1), ctx_));

  // Rank-one downdate by the code contribution of this step. A degenerate
  // (all-zero) step leaves the objective matrix untouched.
  if (!zero_step) {
    // (A^{1/2}x')^T c = x'^T (A^{1/2} c) since the block sqrt is symmetric.
    const Eigen::VectorXd gx_code = cp_.x_prime.transpose() * ctx_.apply_block_sqrt(code_x);
    const Eigen::VectorXd gy_code = cp_.y_prime.transpose() * ctx_.apply_block_sqrt(code_y);
    d_ -= gx_code * gy_code.transpose();
  }
}

DnccmStep DnccmDriver::iterate() {
  DnccmStep step = solve_current();
  apply_downdate(step.w_x, step.w_y);
  return step;
}

ProjectionModel fit_dnccm(const MultiModalDataset& train, int iterations, double ridge) {
  train.validate();
  const int m = train.feature_dim_x();
  const int p = train.feature_dim_y();
  if (train.c() < 2) throw ConfigError("degenerate class structure: need at least 2 classes");

  int q = iterations;
  if (q <= 0) q = m + p;
  if (q > std::min(m, p))
    std::cerr << "warning: " << q << " iterations exceed min(m, p) = " << std::min(m, p)
              << "; directions beyond that come from a rank-deficient pencil\n";

  const CenteredPair cp = center(train.x, train.y);
  const SemanticContext ctx = build_semantic_context(train.labels, train.class_counts);
  DnccmDriver driver(cp, ctx, ridge);
  for (int t = 0; t < q; ++t) driver.iterate();

  ProjectionModel model;
  model.method = Method::dnccm;
  model.w_x = driver.accumulated_w_x();
  model.w_y = driver.accumulated_w_y();
  model.x_mean = cp.x_mean;
  model.y_mean = cp.y_mean;
  model.eigenvalues =
      Eigen::Map<const Eigen::VectorXd>(driver.lambdas().data(), q);
  model.residual_trace = driver.residual_trace();
  model.code_length = q;
  model.class_count = train.c();
  model.ridge_x = driver.ridge_x();
  model.ridge_y = driver.ridge_y();
  return model;
}

}  // namespace mhdcm
