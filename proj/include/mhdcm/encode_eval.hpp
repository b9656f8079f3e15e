#pragma once

#include <Eigen/Core>

#include <string>
#include <utility>

#include "mhdcm/dataset.hpp"
#include "mhdcm/model.hpp"

namespace mhdcm {

enum class FusionRule { concat, sum, x_only, y_only };
enum class DistanceMode { euclidean, hamming };

FusionRule fusion_from_name(const std::string& name);      // throws ConfigError
const char* fusion_name(FusionRule rule);

// Per-sample binary codes in {-1,+1}^L for each modality.
struct HashCodes {
  Eigen::MatrixXd codes_x;  // rows x L
  Eigen::MatrixXd codes_y;
};

struct EvalReport {
  double accuracy = 0.0;
  Eigen::MatrixXi confusion;           // c x c, rows = true class, cols = predicted
  Eigen::VectorXd fisher_ratio;        // per fused dimension, on training projections
  double hamming_reconstruction_error = 0.0;
  int n_train = 0;
  int n_test = 0;
  int k = 1;
  FusionRule fusion = FusionRule::concat;
  DistanceMode distance = DistanceMode::euclidean;
  Method method = Method::dccm;
  int code_length = 0;
};

// Centered projection: (x - 1 x_mean^T) W_x and the analogous y side. The
// label-dependent block weighting is a training-time construct; at inference
// labels are unknown, so plain centered projection is used.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> project(const ProjectionModel& model,
                                                    const Eigen::MatrixXd& x,
                                                    const Eigen::MatrixXd& y);

// Elementwise sign with sgn(0) = +1.
HashCodes hash_codes(const Eigen::MatrixXd& zx, const Eigen::MatrixXd& zy);

Eigen::MatrixXd fuse(const Eigen::MatrixXd& zx, const Eigen::MatrixXd& zy, FusionRule rule);

// Per-column Fisher ratio: between-class variance over within-class variance.
Eigen::VectorXd fisher_ratios(const Eigen::MatrixXd& z, const std::vector<int>& labels,
                              int class_count);

// Projects both sets, fuses, classifies each test sample by majority vote
// among its k nearest training samples (ties on the vote go to the smallest
// class index), and fills the report. In hamming mode the fused hash codes
// are compared instead of the real-valued projections. threads > 1 splits
// the test set; the result does not depend on the thread count.
EvalReport evaluate(const ProjectionModel& model, const MultiModalDataset& train,
                    const MultiModalDataset& test, FusionRule rule, int k,
                    DistanceMode distance = DistanceMode::euclidean, int threads = 1);

// CSV with columns sample_index,label,zx_1..zx_L,zy_1..zy_L; one row per
// sample in stored order, sample_index referring to the input file row.
void export_projection_trace(const ProjectionModel& model, const MultiModalDataset& ds,
                             const std::string& path);

}  // namespace mhdcm
