#include "mhdcm/linalg.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "mhdcm/errors.hpp"

namespace mhdcm {

namespace {

// (G + ridge I)^{-1/2} through a symmetric eigendecomposition. G is a Gram
// matrix, so negative eigenvalues can only be round-off; they are floored at
// the ridge. Without a ridge a numerically singular matrix is an error.
Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& gram, double ridge, const char* side) {
  Eigen::MatrixXd b = gram;
  b.diagonal().array() += ridge;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
  if (eig.info() != Eigen::Success)
    throw NumericError(std::string("eigendecomposition failed for ") + side);
  Eigen::VectorXd evs = eig.eigenvalues();
  const double top = evs.maxCoeff();
  if (top <= 0.0)
    throw NumericError(std::string(side) + " is not positive definite; increase the ridge");
  if (ridge > 0.0) {
    evs = evs.cwiseMax(ridge);
  } else if (evs.minCoeff() <= top * 1e-12) {
    throw NumericError(std::string(side) +
                       " is numerically singular (eigenvalue ratio below 1e-12); "
                       "increase the ridge");
  }
  return eig.eigenvectors() * evs.cwiseInverse().cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

// Eigenvectors are sign-ambiguous and the sign feeds the hash codes, so fix
// it: the first entry of each w_x column that is distinguishable from zero
// must be positive. The paired w_y column flips with it.
void fix_column_signs(Eigen::MatrixXd& w_x, Eigen::MatrixXd& w_y) {
  for (Eigen::Index j = 0; j < w_x.cols(); ++j) {
    const double tol = 1e-9 * w_x.col(j).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < w_x.rows(); ++i) {
      const double v = w_x(i, j);
      if (std::abs(v) > tol) {
        if (v < 0.0) {
          w_x.col(j) = -w_x.col(j);
          w_y.col(j) = -w_y.col(j);
        }
        break;
      }
    }
  }
}

}  // namespace

CenteredPair center(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.rows() != y.rows())
    throw ConfigError("row-count mismatch: " + std::to_string(x.rows()) + " vs " +
                      std::to_string(y.rows()));
  if (x.rows() < 2) throw ConfigError("centering needs at least 2 rows");
  CenteredPair cp;
  cp.x_mean = x.colwise().mean();
  cp.y_mean = y.colwise().mean();
  cp.x_prime = x.rowwise() - cp.x_mean.transpose();
  cp.y_prime = y.rowwise() - cp.y_mean.transpose();
  return cp;
}

double default_ridge(const Eigen::MatrixXd& gram) {
  return 1e-6 * gram.trace() / static_cast<double>(gram.rows());
}

GevProblem build_gev(const CenteredPair& cp, const SemanticContext& ctx, double ridge) {
  return build_gev(cp, ctx,
                   [&ctx](const Eigen::MatrixXd& m) { return ctx.apply_sign_similarity(m); },
                   ridge);
}

GevProblem build_gev(const CenteredPair& cp, const SemanticContext& ctx,
                     const CouplingOp& coupling, double ridge) {
  if (cp.x_prime.rows() != ctx.n() || cp.y_prime.rows() != ctx.n())
    throw ConfigError("centered data does not match the semantic context");
  const Eigen::MatrixXd gx = ctx.apply_block_sqrt(cp.x_prime);  // N x m
  const Eigen::MatrixXd gy = ctx.apply_block_sqrt(cp.y_prime);  // N x p
  GevProblem prob;
  // Gram form keeps the matrices exactly symmetric and PSD.
  prob.gram_x = gx.transpose() * gx;
  prob.gram_y = gy.transpose() * gy;
  prob.cross_xy = gx.transpose() * coupling(gy);
  prob.ridge_x = ridge < 0.0 ? default_ridge(prob.gram_x) : ridge;
  prob.ridge_y = ridge < 0.0 ? default_ridge(prob.gram_y) : ridge;
  return prob;
}

GevSolver::GevSolver(const Eigen::MatrixXd& gram_x, const Eigen::MatrixXd& gram_y,
                     double ridge_x, double ridge_y)
    : white_x_(inverse_sqrt(gram_x, ridge_x, "modality-X Gram matrix")),
      white_y_(inverse_sqrt(gram_y, ridge_y, "modality-Y Gram matrix")) {}

GevSolution GevSolver::solve(const Eigen::MatrixXd& cross_xy, int pair_count) const {
  const Eigen::Index m = white_x_.rows();
  const Eigen::Index p = white_y_.rows();
  if (cross_xy.rows() != m || cross_xy.cols() != p)
    throw ConfigError("coupling matrix is " + std::to_string(cross_xy.rows()) + "x" +
                      std::to_string(cross_xy.cols()) + ", expected " + std::to_string(m) + "x" +
                      std::to_string(p));
  if (pair_count < 1 || pair_count > std::min(m, p))
    throw ConfigError("pair count " + std::to_string(pair_count) +
                      " outside [1, min(m, p)] = [1, " + std::to_string(std::min(m, p)) + "]");

  // Whitening turns the two-block pencil into a plain SVD: with
  // K = Wx C Wy, the triplet (u, v, sigma) gives w_x = Wx u, w_y = Wy v and
  // eigenvalue sigma; the negative half of the pencil spectrum is the same
  // pairs with one side negated.
  const Eigen::MatrixXd k = white_x_ * cross_xy * white_y_;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(k, Eigen::ComputeThinU | Eigen::ComputeThinV);

  GevSolution sol;
  sol.w_x = white_x_ * svd.matrixU().leftCols(pair_count);
  sol.w_y = white_y_ * svd.matrixV().leftCols(pair_count);
  sol.eigenvalues = svd.singularValues().head(pair_count);
  fix_column_signs(sol.w_x, sol.w_y);
  return sol;
}

GevSolution solve_gev(const GevProblem& prob, int pair_count) {
  return GevSolver(prob.gram_x, prob.gram_y, prob.ridge_x, prob.ridge_y)
      .solve(prob.cross_xy, pair_count);
}

}  // namespace mhdcm
