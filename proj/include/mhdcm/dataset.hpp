#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mhdcm {

// Paired per-sample feature rows for two modalities plus integer class
// labels. Rows are stored class-contiguously (labels non-decreasing), which
// the label-derived block matrices rely on.
struct MultiModalDataset {
  Eigen::MatrixXd x;                     // N x m
  Eigen::MatrixXd y;                     // N x p
  std::vector<int> labels;               // N class indices in [0, c)
  std::vector<int> class_counts;         // c entries, each >= 1
  std::vector<int> original_indices;     // stored row -> row index in the input files
  std::vector<std::string> class_names;  // class index -> label string from the file

  int n() const { return static_cast<int>(x.rows()); }
  int feature_dim_x() const { return static_cast<int>(x.cols()); }
  int feature_dim_y() const { return static_cast<int>(y.cols()); }
  int c() const { return static_cast<int>(class_counts.size()); }

  // Throws ConfigError if any structural invariant is violated.
  void validate() const;
};

enum class SplitMode { by_index_file, per_class_count, fraction };

struct SplitSpec {
  SplitMode mode = SplitMode::fraction;
  std::uint32_t seed = 0;
  int train_per_class = 0;      // per_class_count mode
  double train_fraction = 0.5;  // fraction mode, in (0,1)
  std::string index_file;       // by_index_file mode: one original row index per line
};

// Reads two CSV files (header row required, identical row counts). The label
// column must be present in exactly one of them; the other file is aligned by
// row order. Rows are reordered class-contiguously with a stable sort.
MultiModalDataset load_dataset(const std::string& x_path, const std::string& y_path,
                               const std::string& label_column);

// Deterministic train/test split. Both halves keep the full class set and are
// returned class-contiguous.
std::pair<MultiModalDataset, MultiModalDataset> split(const MultiModalDataset& ds,
                                                      const SplitSpec& spec);

}  // namespace mhdcm
