#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

namespace mhdcm {

// Label-derived structure shared by both fitting methods.
//
// The class-block matrix (block-diagonal, one all-ones block per class) and
// its square root are kept in block-implicit form: applying either to an
// N x k matrix is O(N*k). The sign-similarity matrix (+1 same class, -1
// otherwise) is only materialized for small N; larger inputs go through the
// factored form built from per-class sums.
class SemanticContext {
 public:
  static constexpr int kDefaultDenseCap = 10000;

  // labels must be class-contiguous and consistent with class_counts.
  SemanticContext(std::vector<int> labels, std::vector<int> class_counts,
                  int dense_cap = kDefaultDenseCap);

  int n() const { return static_cast<int>(labels_.size()); }
  int c() const { return static_cast<int>(counts_.size()); }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<int>& class_counts() const { return counts_; }

  // Block matrix applied to M: within each class block every output row is
  // the block column sum.
  Eigen::MatrixXd apply_block(const Eigen::MatrixXd& m) const;

  // Square root of the block matrix: block column sums scaled by 1/sqrt(n_d).
  // Applying it twice equals apply_block.
  Eigen::MatrixXd apply_block_sqrt(const Eigen::MatrixXd& m) const;

  // Per-class column sums of M, c x k. Equals U^T M for the one-hot label
  // indicator U.
  Eigen::MatrixXd per_class_sums(const Eigen::MatrixXd& m) const;

  // Sign-similarity matrix applied to M without materializing it:
  // 2 U (U^T M) - 1 (1^T M).
  Eigen::MatrixXd apply_sign_similarity(const Eigen::MatrixXd& m) const;

  // +1 if rows i and j share a class, -1 otherwise.
  double sign_similarity(int i, int j) const {
    return labels_[i] == labels_[j] ? 1.0 : -1.0;
  }

  // Dense sign-similarity matrix; empty when n exceeds the dense cap.
  const std::optional<Eigen::MatrixXd>& sign_similarity_dense() const { return s_prime_; }

 private:
  std::vector<int> labels_;
  std::vector<int> counts_;
  std::vector<int> offsets_;  // start row of each class block
  std::optional<Eigen::MatrixXd> s_prime_;
};

SemanticContext build_semantic_context(const std::vector<int>& labels,
                                       const std::vector<int>& class_counts,
                                       int dense_cap = SemanticContext::kDefaultDenseCap);

// Squared Frobenius distance between the code outer product and the scaled
// sign-similarity target: || P Q^T - scale * S' ||_F^2, computed without
// forming the N x N product. P and Q are N x L sign-code matrices.
double reconstruction_error(const Eigen::MatrixXd& codes_x, const Eigen::MatrixXd& codes_y,
                            double scale, const SemanticContext& ctx);

}  // namespace mhdcm
