#include "satforge/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>

#include "satforge/digest.hpp"
#include "satforge/error.hpp"

namespace satforge {
namespace {

constexpr char kMagic[8] = {'S', 'F', 'V', 'Q', 'G', 'A', 'E', '\0'};

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  void u32(std::uint32_t v) { bytes(&v, sizeof v); }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void f64(double v) { bytes(&v, sizeof v); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void vec(const std::vector<double>& v) {
    u64(v.size());
    bytes(v.data(), v.size() * sizeof(double));
  }
  std::string& data() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}
  void bytes(void* p, std::size_t n) {
    if (n > in_.size() - pos_) throw CheckpointError("checkpoint truncated");
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() { std::uint32_t v; bytes(&v, sizeof v); return v; }
  std::uint64_t u64() { std::uint64_t v; bytes(&v, sizeof v); return v; }
  double f64() { double v; bytes(&v, sizeof v); return v; }
  std::string str() {
    const std::uint32_t n = u32();
    if (n > in_.size() - pos_) throw CheckpointError("checkpoint truncated");
    std::string s(in_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::vector<double> vec() {
    const std::uint64_t n = u64();
    if (n > (in_.size() - pos_) / sizeof(double)) throw CheckpointError("checkpoint truncated");
    std::vector<double> v(n);
    bytes(v.data(), n * sizeof(double));
    return v;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

std::uint32_t crc(std::string_view bytes) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(ckpt.version);
  w.u32(static_cast<std::uint32_t>(ckpt.schema));
  w.u32(static_cast<std::uint32_t>(ckpt.standardizer.schema));
  w.vec(ckpt.standardizer.constraint_mean);
  w.vec(ckpt.standardizer.constraint_std);
  w.vec(ckpt.standardizer.variable_mean);
  w.vec(ckpt.standardizer.variable_std);
  const TrainConfig& c = ckpt.config;
  w.u64(c.hidden);
  w.u64(c.latent);
  w.u64(c.codebook_size);
  w.f64(c.lr);
  w.f64(c.beta);
  w.f64(c.lambda_edge);
  w.u64(static_cast<std::uint64_t>(c.epochs));
  w.f64(c.negative_ratio);
  w.u64(c.seed);
  w.u64(static_cast<std::uint64_t>(c.reinit_period));
  const ModelDims& d = ckpt.model.dims();
  for (std::size_t v : {d.input, d.hidden, d.latent, d.codebook, d.feature_out}) w.u64(v);
  const auto& params = ckpt.model.params();
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const Parameter& p : params) {
    w.str(p.name);
    w.u64(p.value.rows());
    w.u64(p.value.cols());
    w.vec(p.value.values());
  }
  w.str(ckpt.corpus_digest);
  const std::uint32_t sum = crc(w.data());
  w.u32(sum);
  return std::move(w.data());
}

Checkpoint deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < sizeof kMagic + 8) throw CheckpointError("checkpoint truncated");
  if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) throw CheckpointError("not a checkpoint file (bad magic)");
  std::uint32_t stored = 0;
  std::memcpy(&stored, bytes.data() + bytes.size() - 4, 4);
  if (crc(bytes.substr(0, bytes.size() - 4)) != stored) throw CheckpointError("checkpoint checksum mismatch");

  Reader r(bytes.substr(0, bytes.size() - 4));
  char magic[8];
  r.bytes(magic, sizeof magic);
  Checkpoint ckpt;
  ckpt.version = r.u32();
  if (ckpt.version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(ckpt.version));
  }
  const std::uint32_t schema = r.u32();
  const std::uint32_t std_schema = r.u32();
  if (schema > 1 || std_schema > 1) throw CheckpointError("unknown feature schema id");
  ckpt.schema = static_cast<SchemaId>(schema);
  ckpt.standardizer.schema = static_cast<SchemaId>(std_schema);
  ckpt.standardizer.constraint_mean = r.vec();
  ckpt.standardizer.constraint_std = r.vec();
  ckpt.standardizer.variable_mean = r.vec();
  ckpt.standardizer.variable_std = r.vec();
  TrainConfig& c = ckpt.config;
  c.hidden = r.u64();
  c.latent = r.u64();
  c.codebook_size = r.u64();
  c.lr = r.f64();
  c.beta = r.f64();
  c.lambda_edge = r.f64();
  c.epochs = static_cast<int>(r.u64());
  c.negative_ratio = r.f64();
  c.seed = r.u64();
  c.reinit_period = static_cast<int>(r.u64());
  ModelDims d;
  d.input = r.u64();
  d.hidden = r.u64();
  d.latent = r.u64();
  d.codebook = r.u64();
  d.feature_out = r.u64();
  ckpt.model = VqGae(d, 0);
  const std::uint32_t count = r.u32();
  auto& params = ckpt.model.params();
  if (count != params.size()) throw CheckpointError("checkpoint parameter count does not match the model");
  for (Parameter& p : params) {
    const std::string name = r.str();
    const std::uint64_t rows = r.u64();
    const std::uint64_t cols = r.u64();
    std::vector<double> values = r.vec();
    if (name != p.name || rows != p.value.rows() || cols != p.value.cols()) {
      throw CheckpointError("checkpoint parameter '" + name + "' does not match the model layout");
    }
    p.value = Matrix(rows, cols, std::move(values));
    p.grad = Matrix(rows, cols);
  }
  ckpt.corpus_digest = r.str();
  if (!r.done()) throw CheckpointError("trailing bytes in checkpoint");
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) { write_file(path, serialize_checkpoint(ckpt)); }

Checkpoint load_checkpoint(const std::string& path) {
  std::string bytes;
  try {
    bytes = read_file(path);
  } catch (const DataError& e) {
    throw CheckpointError(e.what());
  }
  return deserialize_checkpoint(bytes);
}

SchemaBinding bind_schema(const Checkpoint& ckpt, SchemaId requested) {
  if (ckpt.model.dims().input != model_input_width()) {
    throw CheckpointError("checkpoint input width " + std::to_string(ckpt.model.dims().input) +
                          " does not match feature width " + std::to_string(model_input_width()));
  }
  return SchemaBinding{requested != ckpt.schema};
}

}  // namespace satforge
