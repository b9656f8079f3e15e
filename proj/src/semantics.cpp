#include "mhdcm/semantics.hpp"

#include <cmath>

#include "mhdcm/errors.hpp"

namespace mhdcm {

SemanticContext::SemanticContext(std::vector<int> labels, std::vector<int> class_counts,
                                 int dense_cap)
    : labels_(std::move(labels)), counts_(std::move(class_counts)) {
  const int n = static_cast<int>(labels_.size());
  if (n < 1) throw ConfigError("semantic context needs at least one sample");
  offsets_.reserve(counts_.size());
  int offset = 0;
  for (std::size_t d = 0; d < counts_.size(); ++d) {
    if (counts_[d] < 1) throw ConfigError("empty class block");
    offsets_.push_back(offset);
    for (int i = 0; i < counts_[d]; ++i) {
      if (offset + i >= n || labels_[offset + i] != static_cast<int>(d))
        throw ConfigError("dataset not class-ordered");
    }
    offset += counts_[d];
  }
  if (offset != n) throw ConfigError("class counts do not sum to the sample count");

  if (n <= dense_cap) {
    Eigen::MatrixXd s(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s(i, j) = labels_[i] == labels_[j] ? 1.0 : -1.0;
    s_prime_ = std::move(s);
  }
}

Eigen::MatrixXd SemanticContext::apply_block(const Eigen::MatrixXd& m) const {
  if (m.rows() != n()) throw ConfigError("matrix row count does not match sample count");
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t d = 0; d < counts_.size(); ++d) {
    const auto block = m.middleRows(offsets_[d], counts_[d]);
    out.middleRows(offsets_[d], counts_[d]).rowwise() = block.colwise().sum();
  }
  return out;
}

Eigen::MatrixXd SemanticContext::apply_block_sqrt(const Eigen::MatrixXd& m) const {
  if (m.rows() != n()) throw ConfigError("matrix row count does not match sample count");
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t d = 0; d < counts_.size(); ++d) {
    const auto block = m.middleRows(offsets_[d], counts_[d]);
    out.middleRows(offsets_[d], counts_[d]).rowwise() =
        block.colwise().sum() / std::sqrt(static_cast<double>(counts_[d]));
  }
  return out;
}

Eigen::MatrixXd SemanticContext::per_class_sums(const Eigen::MatrixXd& m) const {
  if (m.rows() != n()) throw ConfigError("matrix row count does not match sample count");
  Eigen::MatrixXd out(c(), m.cols());
  for (std::size_t d = 0; d < counts_.size(); ++d)
    out.row(static_cast<Eigen::Index>(d)) =
        m.middleRows(offsets_[d], counts_[d]).colwise().sum();
  return out;
}

Eigen::MatrixXd SemanticContext::apply_sign_similarity(const Eigen::MatrixXd& m) const {
  const Eigen::MatrixXd class_sums = per_class_sums(m);        // c x k
  const Eigen::RowVectorXd total = m.colwise().sum();          // 1 x k
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (int i = 0; i < n(); ++i)
    out.row(i) = 2.0 * class_sums.row(labels_[i]) - total;
  return out;
}

SemanticContext build_semantic_context(const std::vector<int>& labels,
                                       const std::vector<int>& class_counts, int dense_cap) {
  return SemanticContext(labels, class_counts, dense_cap);
}

double reconstruction_error(const Eigen::MatrixXd& codes_x, const Eigen::MatrixXd& codes_y,
                            double scale, const SemanticContext& ctx) {
  if (codes_x.rows() != ctx.n() || codes_y.rows() != ctx.n() ||
      codes_x.cols() != codes_y.cols())
    throw ConfigError("code matrices do not match the semantic context");
  const double n = static_cast<double>(ctx.n());
  // ||P Q^T - s S'||^2 = tr((P^T P)(Q^T Q)) - 2 s tr(P^T S' Q) + s^2 ||S'||^2,
  // with ||S'||^2 = N^2 (every entry is +-1) and the middle term factored
  // through per-class sums.
  const double t1 = (codes_x.transpose() * codes_x)
                        .cwiseProduct((codes_y.transpose() * codes_y).transpose())
                        .sum();
  const Eigen::MatrixXd ux = ctx.per_class_sums(codes_x);  // c x L
  const Eigen::MatrixXd uy = ctx.per_class_sums(codes_y);
  const Eigen::RowVectorXd sx = codes_x.colwise().sum();
  const Eigen::RowVectorXd sy = codes_y.colwise().sum();
  const double t2 = 2.0 * ux.cwiseProduct(uy).sum() - sx.dot(sy);
  return t1 - 2.0 * scale * t2 + scale * scale * n * n;
}

}  // namespace mhdcm
