#include "mhdcm/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mhdcm/errors.hpp"

namespace mhdcm {

namespace {

int parse_int(const std::string& key, const std::string& value) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("bad integer for '" + key + "': " + value);
  return v;
}

double parse_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), v, std::chars_format::general);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("bad number for '" + key + "': " + value);
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("bad boolean for '" + key + "': " + value);
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

}  // namespace

void apply_key_value(RunConfig& config, const std::string& key, const std::string& value) {
  if (key == "x_path") config.x_path = value;
  else if (key == "y_path") config.y_path = value;
  else if (key == "label_column") config.label_column = value;
  else if (key == "method") config.method = method_from_name(value);
  else if (key == "code_length") config.code_length = parse_int(key, value);
  else if (key == "iterations") config.iterations = parse_int(key, value);
  else if (key == "ridge") config.ridge = value == "auto" ? -1.0 : parse_double(key, value);
  else if (key == "split_mode") {
    if (value == "fraction") config.split.mode = SplitMode::fraction;
    else if (value == "per_class") config.split.mode = SplitMode::per_class_count;
    else if (value == "index_file") config.split.mode = SplitMode::by_index_file;
    else throw ConfigError("bad split_mode '" + value +
                           "' (expected fraction, per_class or index_file)");
  }
  else if (key == "train_fraction") config.split.train_fraction = parse_double(key, value);
  else if (key == "train_per_class") config.split.train_per_class = parse_int(key, value);
  else if (key == "index_file") config.split.index_file = value;
  else if (key == "seed") config.split.seed = static_cast<std::uint32_t>(parse_int(key, value));
  else if (key == "fusion") config.fusion = fusion_from_name(value);
  else if (key == "k") config.k = parse_int(key, value);
  else if (key == "distance") {
    if (value == "euclidean") config.distance = DistanceMode::euclidean;
    else if (value == "hamming") config.distance = DistanceMode::hamming;
    else throw ConfigError("bad distance '" + value + "' (expected euclidean or hamming)");
  }
  else if (key == "threads") config.threads = parse_int(key, value);
  else if (key == "out_dir") config.out_dir = value;
  else if (key == "force") config.force = parse_bool(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

void load_config_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
    apply_key_value(config, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
}

std::string canonical_config(const RunConfig& config) {
  std::ostringstream out;
  const auto mode = [&]() {
    switch (config.split.mode) {
      case SplitMode::fraction: return "fraction";
      case SplitMode::per_class_count: return "per_class";
      default: return "index_file";
    }
  }();
  out << "code_length=" << config.code_length << "\n"
      << "distance=" << (config.distance == DistanceMode::euclidean ? "euclidean" : "hamming")
      << "\n"
      << "fusion=" << fusion_name(config.fusion) << "\n"
      << "index_file=" << config.split.index_file << "\n"
      << "iterations=" << config.iterations << "\n"
      << "k=" << config.k << "\n"
      << "label_column=" << config.label_column << "\n"
      << "method=" << method_name(config.method) << "\n"
      << "ridge=" << (config.ridge < 0.0 ? std::string("auto") : std::to_string(config.ridge))
      << "\n"
      << "seed=" << config.split.seed << "\n"
      << "split_mode=" << mode << "\n"
      << "threads=" << config.threads << "\n"
      << "train_fraction=" << config.split.train_fraction << "\n"
      << "train_per_class=" << config.split.train_per_class << "\n"
      << "x_path=" << config.x_path << "\n"
      << "y_path=" << config.y_path << "\n";
  return out.str();
}

std::uint64_t config_hash(const RunConfig& config) {
  // FNV-1a, stable across platforms.
  const std::string canon = canonical_config(config);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace mhdcm
