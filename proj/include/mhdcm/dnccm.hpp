#pragma once

#include <Eigen/Core>

#include <vector>

#include "mhdcm/dataset.hpp"
#include "mhdcm/linalg.hpp"
#include "mhdcm/model.hpp"
#include "mhdcm/semantics.hpp"

namespace mhdcm {

// Initial objective matrix of the iterative method, in the factored form
//   2 [(A^{1/2}x')^T U][(A^{1/2}y')^T U]^T - [(A^{1/2}x')^T 1][(A^{1/2}y')^T 1]^T
// which avoids materializing the N x N sign-similarity matrix.
Eigen::MatrixXd init_d0(const CenteredPair& cp, const SemanticContext& ctx);

struct DnccmStep {
  Eigen::VectorXd w_x;
  Eigen::VectorXd w_y;
  double lambda = 0.0;
  bool degenerate = false;  // objective matrix was all-zero
};

// One deflation pass: solve the current pencil, hash the new direction,
// record the residual, downdate the objective matrix by the rank-one code
// contribution. Steps are inherently sequential; the Gram matrices and their
// whiteners are computed once.
class DnccmDriver {
 public:
  DnccmDriver(const CenteredPair& cp, const SemanticContext& ctx, double ridge);

  // Top eigenpair of the current pencil at unit normalization
  // (w^T (G + r I) w = 1). Does not mutate the state. An all-zero objective
  // matrix yields zero vectors with lambda 0 and the degenerate flag set.
  DnccmStep solve_current() const;

  // Accepts the vectors of the just-completed step: appends them and their
  // sign codes, records the signed objective, and subtracts the rank-one
  // code contribution from the objective matrix. Zero vectors (degenerate
  // step) leave the objective matrix unchanged.
  void apply_downdate(const Eigen::VectorXd& w_x, const Eigen::VectorXd& w_y);

  // solve_current + apply_downdate.
  DnccmStep iterate();

  int completed_steps() const { return static_cast<int>(lambdas_.size()); }
  const Eigen::MatrixXd& objective_matrix() const { return d_; }
  const Eigen::MatrixXd& accumulated_w_x() const { return w_x_; }
  const Eigen::MatrixXd& accumulated_w_y() const { return w_y_; }
  const std::vector<double>& lambdas() const { return lambdas_; }
  const std::vector<double>& residual_trace() const { return residual_trace_; }
  double ridge_x() const { return ridge_x_; }
  double ridge_y() const { return ridge_y_; }

 private:
  const CenteredPair& cp_;
  const SemanticContext& ctx_;
  double ridge_x_, ridge_y_;
  GevSolver solver_;
  Eigen::MatrixXd d_;                    // current m x p objective matrix
  Eigen::MatrixXd w_x_, w_y_;            // accumulated vectors as columns
  Eigen::MatrixXd codes_x_, codes_y_;    // accumulated sign codes, N x t
  std::vector<double> lambdas_;
  std::vector<double> residual_trace_;
};

// Iterative non-canonical fit. iterations <= 0 selects m + p as printed;
// directions beyond min(m, p) come from a rank-deficient pencil and trigger
// a warning, but all requested columns are emitted. ridge < 0 selects the
// per-side defaults. No other knob affects the result.
ProjectionModel fit_dnccm(const MultiModalDataset& train, int iterations = 0,
                          double ridge = -1.0);

}  // namespace mhdcm
