#include "mhdcm/model_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "mhdcm/errors.hpp"

namespace mhdcm {

namespace {

constexpr char kMagic[8] = {'M', 'H', 'P', 'R', 'O', 'J', '0', '1'};
constexpr std::uint32_t kFormatVersion = 1;

void put_bytes(std::vector<unsigned char>& out, const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  out.insert(out.end(), bytes, bytes + size);
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) { put_bytes(out, &v, 4); }
void put_u64(std::vector<unsigned char>& out, std::uint64_t v) { put_bytes(out, &v, 8); }
void put_f64(std::vector<unsigned char>& out, double v) { put_bytes(out, &v, 8); }

void put_matrix(std::vector<unsigned char>& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(out, m(r, c));
}

struct Reader {
  const std::vector<unsigned char>& bytes;
  std::size_t pos = 0;

  void read(void* dst, std::size_t size) {
    if (pos + size > bytes.size()) throw ConfigError("model file truncated");
    std::memcpy(dst, bytes.data() + pos, size);
    pos += size;
  }
  std::uint32_t u32() { std::uint32_t v; read(&v, 4); return v; }
  std::uint64_t u64() { std::uint64_t v; read(&v, 8); return v; }
  double f64() { double v; read(&v, 8); return v; }
  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = f64();
    return m;
  }
};

}  // namespace

std::vector<unsigned char> serialize_model(const ProjectionModel& model) {
  std::vector<unsigned char> out;
  put_bytes(out, kMagic, sizeof(kMagic));
  put_u32(out, kFormatVersion);
  put_u32(out, model.method == Method::dccm ? 0u : 1u);
  put_u64(out, static_cast<std::uint64_t>(model.feature_dim_x()));
  put_u64(out, static_cast<std::uint64_t>(model.feature_dim_y()));
  put_u64(out, static_cast<std::uint64_t>(model.code_length));
  put_u64(out, static_cast<std::uint64_t>(model.class_count));
  put_f64(out, model.ridge_x);
  put_f64(out, model.ridge_y);
  put_matrix(out, model.x_mean);
  put_matrix(out, model.y_mean);
  put_matrix(out, model.w_x);
  put_matrix(out, model.w_y);
  put_matrix(out, model.eigenvalues);
  put_u64(out, model.residual_trace.size());
  for (double v : model.residual_trace) put_f64(out, v);
  return out;
}

ProjectionModel deserialize_model(const std::vector<unsigned char>& bytes) {
  Reader r{bytes};
  char magic[8];
  r.read(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw ConfigError("not a model file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion)
    throw ConfigError("unsupported model format version " + std::to_string(version));
  const std::uint32_t method = r.u32();
  if (method > 1) throw ConfigError("unknown method tag " + std::to_string(method));

  ProjectionModel model;
  model.method = method == 0 ? Method::dccm : Method::dnccm;
  const auto m = static_cast<Eigen::Index>(r.u64());
  const auto p = static_cast<Eigen::Index>(r.u64());
  const auto l = static_cast<Eigen::Index>(r.u64());
  const auto c = static_cast<Eigen::Index>(r.u64());
  if (m < 1 || p < 1 || l < 1 || c < 1 || m > (1 << 24) || p > (1 << 24) || l > (1 << 24))
    throw ConfigError("model file has implausible dimensions");
  model.code_length = static_cast<int>(l);
  model.class_count = static_cast<int>(c);
  model.ridge_x = r.f64();
  model.ridge_y = r.f64();
  model.x_mean = r.matrix(m, 1);
  model.y_mean = r.matrix(p, 1);
  model.w_x = r.matrix(m, l);
  model.w_y = r.matrix(p, l);
  model.eigenvalues = r.matrix(l, 1);
  const std::uint64_t trace_len = r.u64();
  if (trace_len > (1u << 24)) throw ConfigError("model file has implausible trace length");
  model.residual_trace.resize(trace_len);
  for (auto& v : model.residual_trace) v = r.f64();
  if (r.pos != bytes.size()) throw ConfigError("trailing bytes in model file");
  return model;
}

void save_model(const ProjectionModel& model, const std::string& path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write model file: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("short write to model file: " + path);
}

ProjectionModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open model file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace mhdcm
