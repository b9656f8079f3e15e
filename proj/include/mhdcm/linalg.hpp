#pragma once

#include <Eigen/Core>

#include <functional>

#include "mhdcm/semantics.hpp"

namespace mhdcm {

struct CenteredPair {
  Eigen::MatrixXd x_prime;  // N x m, columns sum to ~0
  Eigen::MatrixXd y_prime;  // N x p
  Eigen::VectorXd x_mean;
  Eigen::VectorXd y_mean;
};

CenteredPair center(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

// Two-block generalized eigenvalue problem
//   [0 C; C^T 0] w = lambda [Gx + rx I, 0; 0, Gy + ry I] w
// with C the cross-modality coupling and Gx/Gy the block-weighted Gram
// matrices of the centered modalities.
struct GevProblem {
  Eigen::MatrixXd cross_xy;  // m x p coupling
  Eigen::MatrixXd gram_x;    // m x m symmetric PSD
  Eigen::MatrixXd gram_y;    // p x p symmetric PSD
  double ridge_x = 0.0;
  double ridge_y = 0.0;
};

struct GevSolution {
  Eigen::MatrixXd w_x;          // m x L, columns satisfy w^T (Gx + rx I) w = 1
  Eigen::MatrixXd w_y;          // p x L
  Eigen::VectorXd eigenvalues;  // L nonnegative values, descending
};

// Default ridge used when the caller passes a negative value: scaled to the
// mean diagonal magnitude of the Gram matrix.
double default_ridge(const Eigen::MatrixXd& gram);

// Operator applied between the block-sqrt-weighted modalities to form the
// coupling matrix. Maps an N x k matrix to an N x k matrix.
using CouplingOp = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

// Coupling through the sign-similarity matrix (factored, never materialized).
// ridge < 0 selects per-side defaults.
GevProblem build_gev(const CenteredPair& cp, const SemanticContext& ctx, double ridge);

// Caller-supplied coupling operator.
GevProblem build_gev(const CenteredPair& cp, const SemanticContext& ctx,
                     const CouplingOp& coupling, double ridge);

// Whitening + SVD solver for the two-block pencil. The whiteners
// (Gx + rx I)^{-1/2} and (Gy + ry I)^{-1/2} are computed once and can be
// reused across couplings, which the iterative method relies on.
class GevSolver {
 public:
  GevSolver(const Eigen::MatrixXd& gram_x, const Eigen::MatrixXd& gram_y,
            double ridge_x, double ridge_y);

  // Top pair_count eigenpairs, equivalently the top singular triplets of
  // Wx * cross * Wy. Columns are sign-fixed (first nonzero entry of each
  // w_x column positive) and ordered by descending eigenvalue.
  GevSolution solve(const Eigen::MatrixXd& cross_xy, int pair_count) const;

 private:
  Eigen::MatrixXd white_x_;  // (Gx + rx I)^{-1/2}
  Eigen::MatrixXd white_y_;
};

GevSolution solve_gev(const GevProblem& prob, int pair_count);

}  // namespace mhdcm
