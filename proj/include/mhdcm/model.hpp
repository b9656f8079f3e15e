#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace mhdcm {

enum class Method { dccm, dnccm };

const char* method_name(Method method);
Method method_from_name(const std::string& name);  // throws ConfigError

// A fitted pair of projection matrices plus the training means needed to
// apply them. For the canonical method `eigenvalues` is the solved spectrum;
// for the iterative method it is the per-iteration top eigenvalue and
// `residual_trace` holds the signed objective after each iteration.
struct ProjectionModel {
  Method method = Method::dccm;
  Eigen::MatrixXd w_x;  // m x L
  Eigen::MatrixXd w_y;  // p x L
  Eigen::VectorXd x_mean;
  Eigen::VectorXd y_mean;
  Eigen::VectorXd eigenvalues;        // L values
  std::vector<double> residual_trace; // dnccm only, one entry per iteration
  int code_length = 0;                // L
  int class_count = 0;                // c of the training set
  double ridge_x = 0.0;
  double ridge_y = 0.0;

  int feature_dim_x() const { return static_cast<int>(w_x.rows()); }
  int feature_dim_y() const { return static_cast<int>(w_y.rows()); }
};

}  // namespace mhdcm
