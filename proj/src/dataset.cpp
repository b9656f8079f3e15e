#include "mhdcm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "mhdcm/errors.hpp"

namespace mhdcm {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
      line.erase(0, 3);  // UTF-8 BOM
    if (line.empty()) continue;
    if (first) {
      table.header = split_line(line);
      first = false;
    } else {
      table.rows.push_back(split_line(line));
    }
  }
  if (first) throw ConfigError("missing header row in " + path);
  return table;
}

double parse_feature(const std::string& cell, const std::string& path, std::size_t row,
                     const std::string& column) {
  if (cell.empty())
    throw ConfigError("missing cell in " + path + " data row " + std::to_string(row + 1) +
                      ", column '" + column + "'");
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value, std::chars_format::general);
  if (ec != std::errc() || ptr != end)
    throw ConfigError("non-numeric feature cell '" + cell + "' in " + path + " data row " +
                      std::to_string(row + 1) + ", column '" + column + "'");
  if (!std::isfinite(value))
    throw ConfigError("non-finite feature value '" + cell + "' in " + path + " data row " +
                      std::to_string(row + 1) + ", column '" + column + "'");
  return value;
}

// Labels that all parse as integers sort numerically, anything else sorts
// lexicographically.
bool all_integral(const std::vector<std::string>& values) {
  for (const auto& v : values) {
    if (v.empty()) return false;
    long long parsed = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
    if (ec != std::errc() || ptr != v.data() + v.size()) return false;
  }
  return true;
}

Eigen::MatrixXd extract_features(const CsvTable& table, int label_col, const std::string& path) {
  const std::size_t n_cols = table.header.size();
  const int n_features = static_cast<int>(n_cols) - (label_col >= 0 ? 1 : 0);
  if (n_features < 1) throw ConfigError(path + " has no feature columns");
  Eigen::MatrixXd features(table.rows.size(), n_features);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != n_cols)
      throw ConfigError("row " + std::to_string(r + 1) + " of " + path + " has " +
                        std::to_string(table.rows[r].size()) + " cells, header has " +
                        std::to_string(n_cols));
    int out = 0;
    for (std::size_t ccol = 0; ccol < n_cols; ++ccol) {
      if (static_cast<int>(ccol) == label_col) continue;
      features(static_cast<Eigen::Index>(r), out++) =
          parse_feature(table.rows[r][ccol], path, r, table.header[ccol]);
    }
  }
  return features;
}

// Portable bounded draw: std::shuffle and the distribution adaptors are
// implementation-defined, this keeps splits identical across toolchains.
std::uint32_t bounded_draw(std::mt19937& rng, std::uint32_t bound) {
  const std::uint32_t max = std::numeric_limits<std::uint32_t>::max();
  const std::uint32_t limit = max - max % bound;
  std::uint32_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

void fisher_yates(std::vector<int>& values, std::mt19937& rng) {
  for (std::size_t i = values.size(); i > 1; --i)
    std::swap(values[i - 1], values[bounded_draw(rng, static_cast<std::uint32_t>(i))]);
}

MultiModalDataset take_rows(const MultiModalDataset& ds, const std::vector<int>& rows) {
  MultiModalDataset out;
  out.x.resize(rows.size(), ds.x.cols());
  out.y.resize(rows.size(), ds.y.cols());
  out.labels.reserve(rows.size());
  out.original_indices.reserve(rows.size());
  out.class_counts.assign(ds.c(), 0);
  out.class_names = ds.class_names;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int r = rows[i];
    out.x.row(static_cast<Eigen::Index>(i)) = ds.x.row(r);
    out.y.row(static_cast<Eigen::Index>(i)) = ds.y.row(r);
    out.labels.push_back(ds.labels[r]);
    out.original_indices.push_back(ds.original_indices[r]);
    out.class_counts[ds.labels[r]] += 1;
  }
  return out;
}

}  // namespace

void MultiModalDataset::validate() const {
  const int N = n();
  if (N < 2) throw ConfigError("dataset needs at least 2 samples, got " + std::to_string(N));
  if (y.rows() != N)
    throw ConfigError("row-count mismatch: modality X has " + std::to_string(N) +
                      " rows, modality Y has " + std::to_string(y.rows()));
  if (static_cast<int>(labels.size()) != N) throw ConfigError("label count does not match rows");
  if (c() < 2) throw ConfigError("fewer than 2 classes");
  std::vector<int> recount(class_counts.size(), 0);
  for (int i = 0; i < N; ++i) {
    if (labels[i] < 0 || labels[i] >= c()) throw ConfigError("label index out of range");
    recount[labels[i]] += 1;
    if (i > 0 && labels[i] < labels[i - 1]) throw ConfigError("dataset not class-ordered");
  }
  for (std::size_t d = 0; d < class_counts.size(); ++d) {
    if (class_counts[d] < 1)
      throw ConfigError("class " + std::to_string(d) + " has no samples");
    if (recount[d] != class_counts[d])
      throw ConfigError("class counts do not match the stored labels");
  }
  if (!x.allFinite() || !y.allFinite()) throw ConfigError("non-finite feature value");
}

MultiModalDataset load_dataset(const std::string& x_path, const std::string& y_path,
                               const std::string& label_column) {
  const CsvTable tx = read_csv(x_path);
  const CsvTable ty = read_csv(y_path);

  if (tx.rows.size() != ty.rows.size())
    throw ConfigError("row-count mismatch: " + x_path + " has " + std::to_string(tx.rows.size()) +
                      " data rows, " + y_path + " has " + std::to_string(ty.rows.size()));

  const auto find_col = [&](const CsvTable& t) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
      if (t.header[i] == label_column) return static_cast<int>(i);
    return -1;
  };
  const int label_in_x = find_col(tx);
  const int label_in_y = find_col(ty);
  if (label_in_x >= 0 && label_in_y >= 0)
    throw ConfigError("label column '" + label_column + "' present in both files");
  if (label_in_x < 0 && label_in_y < 0)
    throw ConfigError("label column '" + label_column + "' not found in either file");

  const CsvTable& label_table = label_in_x >= 0 ? tx : ty;
  const int label_col = label_in_x >= 0 ? label_in_x : label_in_y;
  const std::size_t n = tx.rows.size();
  if (n < 2) throw ConfigError("dataset needs at least 2 samples, got " + std::to_string(n));

  std::vector<std::string> raw_labels(n);
  for (std::size_t r = 0; r < n; ++r) {
    if (label_table.rows[r].size() <= static_cast<std::size_t>(label_col) ||
        label_table.rows[r][label_col].empty())
      throw ConfigError("missing label in data row " + std::to_string(r + 1));
    raw_labels[r] = label_table.rows[r][label_col];
  }

  std::vector<std::string> distinct(raw_labels);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) throw ConfigError("fewer than 2 classes in label column '" +
                                             label_column + "'");
  if (all_integral(distinct)) {
    std::sort(distinct.begin(), distinct.end(), [](const std::string& a, const std::string& b) {
      long long va = 0, vb = 0;
      std::from_chars(a.data(), a.data() + a.size(), va);
      std::from_chars(b.data(), b.data() + b.size(), vb);
      return va < vb;
    });
  }
  std::map<std::string, int> label_index;
  for (std::size_t i = 0; i < distinct.size(); ++i) label_index[distinct[i]] = static_cast<int>(i);

  const Eigen::MatrixXd fx = extract_features(tx, label_in_x, x_path);
  const Eigen::MatrixXd fy = extract_features(ty, label_in_y, y_path);

  // Stable sort by class keeps file order within each class.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return label_index.at(raw_labels[a]) < label_index.at(raw_labels[b]);
  });

  MultiModalDataset ds;
  ds.x.resize(n, fx.cols());
  ds.y.resize(n, fy.cols());
  ds.labels.resize(n);
  ds.original_indices.resize(n);
  ds.class_counts.assign(distinct.size(), 0);
  ds.class_names = distinct;
  for (std::size_t i = 0; i < n; ++i) {
    const int src = order[i];
    ds.x.row(static_cast<Eigen::Index>(i)) = fx.row(src);
    ds.y.row(static_cast<Eigen::Index>(i)) = fy.row(src);
    ds.labels[i] = label_index.at(raw_labels[src]);
    ds.original_indices[i] = src;
    ds.class_counts[ds.labels[i]] += 1;
  }
  ds.validate();
  return ds;
}

std::pair<MultiModalDataset, MultiModalDataset> split(const MultiModalDataset& ds,
                                                      const SplitSpec& spec) {
  ds.validate();
  std::vector<int> train_rows, test_rows;

  if (spec.mode == SplitMode::by_index_file) {
    std::ifstream in(spec.index_file);
    if (!in) throw ConfigError("cannot open index file: " + spec.index_file);
    // File holds original (pre-sort) row indices; map them to stored rows.
    std::vector<int> stored_of_original(ds.n(), -1);
    for (int i = 0; i < ds.n(); ++i) stored_of_original[ds.original_indices[i]] = i;
    std::set<int> chosen;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const std::string t = trim(line);
      if (t.empty()) continue;
      int idx = 0;
      auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), idx);
      if (ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError("bad index '" + t + "' in " + spec.index_file);
      if (idx < 0 || idx >= ds.n())
        throw ConfigError("index " + t + " out of range [0, " + std::to_string(ds.n()) + ")");
      if (!chosen.insert(idx).second)
        throw ConfigError("duplicate index " + t + " in " + spec.index_file);
    }
    for (int i = 0; i < ds.n(); ++i) {
      if (chosen.count(ds.original_indices[i]))
        train_rows.push_back(i);
      else
        test_rows.push_back(i);
    }
  } else {
    std::mt19937 rng(spec.seed);
    int offset = 0;
    for (int d = 0; d < ds.c(); ++d) {
      const int nd = ds.class_counts[d];
      int take = 0;
      if (spec.mode == SplitMode::per_class_count) {
        take = spec.train_per_class;
        if (take < 1 || take > nd - 1)
          throw ConfigError("requested per-class count " + std::to_string(take) +
                            " exceeds available samples of class " + std::to_string(d) +
                            " (have " + std::to_string(nd) + ", test needs at least 1)");
      } else {
        if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
          throw ConfigError("train fraction must be in (0,1)");
        if (nd < 2)
          throw ConfigError("class " + std::to_string(d) + " has a single sample; cannot split");
        take = std::clamp(static_cast<int>(std::lround(spec.train_fraction * nd)), 1, nd - 1);
      }
      std::vector<int> rows(nd);
      std::iota(rows.begin(), rows.end(), offset);
      fisher_yates(rows, rng);
      std::sort(rows.begin(), rows.begin() + take);
      std::sort(rows.begin() + take, rows.end());
      train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + take);
      test_rows.insert(test_rows.end(), rows.begin() + take, rows.end());
      offset += nd;
    }
  }

  MultiModalDataset train = take_rows(ds, train_rows);
  MultiModalDataset test = take_rows(ds, test_rows);
  for (int d = 0; d < ds.c(); ++d) {
    if (train.class_counts[d] < 1)
      throw ConfigError("split leaves class " + std::to_string(d) + " empty in the training set");
    if (test.class_counts[d] < 1)
      throw ConfigError("split leaves class " + std::to_string(d) + " empty in the test set");
  }
  train.validate();
  test.validate();
  return {std::move(train), std::move(test)};
}

}  // namespace mhdcm
