#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "mhdcm/dataset.hpp"
#include "mhdcm/encode_eval.hpp"
#include "mhdcm/model.hpp"

namespace mhdcm {

// Everything a run needs, assembled from defaults, an optional flat
// key=value config file, and command-line overrides (in that order).
struct RunConfig {
  std::string x_path;
  std::string y_path;
  std::string label_column;
  Method method = Method::dccm;
  int code_length = 0;   // dccm; 0 = min(m, p, c-1)
  int iterations = 0;    // dnccm; 0 = m + p
  double ridge = -1.0;   // < 0 = per-side defaults
  SplitSpec split;
  FusionRule fusion = FusionRule::concat;
  int k = 1;
  DistanceMode distance = DistanceMode::euclidean;
  int threads = 1;
  std::string out_dir;
  bool force = false;
};

// Applies one key=value entry. Throws ConfigError on unknown keys or
// unparsable values, naming the key.
void apply_key_value(RunConfig& config, const std::string& key, const std::string& value);

// Flat key=value file; '#' starts a comment, blank lines ignored.
void load_config_file(RunConfig& config, const std::string& path);

// Canonical serialization (sorted key=value lines) and its FNV-1a hash; the
// hash lands in the run manifest so identical configs are recognizable.
std::string canonical_config(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);

}  // namespace mhdcm
