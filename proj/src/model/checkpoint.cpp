#include "leam/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "leam/error.hpp"

namespace leam {
namespace {


constexpr char kMagic[4] = {'L', 'E', 'A', 'M'};

class Writer {
 public:
  void bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    out_.insert(out_.end(), p, p + n);
  }
  void u32(std::uint64_t value) {
    if (value > std::numeric_limits<std::uint32_t>::max()) {
      throw DataError("checkpoint field " + std::to_string(value) + " exceeds 32 bits");
    }
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
  void f64(double value) {
    const auto bits = std::bit_cast<std::uint64_t>(value);
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  void matrix(const Matrix& m) {
    for (double x : m.data()) f64(x);
  }
  void string(const std::string& s) {
    u32(s.size());
    bytes(s.data(), s.size());
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& in) : in_(in) {}

  const std::uint8_t* take(std::size_t n) {
    if (n > in_.size() - pos_) {
      throw DataError("checkpoint truncated at byte " + std::to_string(pos_));
    }
    const auto* p = in_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::uint32_t u32() {
    const auto* p = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
  }
  double f64() {
    const auto* p = take(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(bits);
  }
  Matrix matrix(std::size_t rows, std::size_t cols) {
    if (cols != 0 && rows > (in_.size() - pos_) / 8 / cols) {
      throw DataError("checkpoint truncated: matrix of " + std::to_string(rows) + "x" +
                      std::to_string(cols) + " does not fit");
    }
    Matrix m(rows, cols);
    for (double& x : m.data()) x = f64();
    return m;
  }
  std::string string() {
    const std::uint32_t n = u32();
    const auto* p = take(n);
    return std::string(reinterpret_cast<const char*>(p), n);
  }
  bool done() const noexcept { return pos_ == in_.size(); }

 private:
  const std::vector<std::uint8_t>& in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const Model& model) {
  const ModelParams& p = model.params;
  p.validate();
  const std::size_t K = p.num_classes();
  if (model.vocab.size() != p.vocab_size()) {
    throw ShapeError("vocabulary of " + std::to_string(model.vocab.size()) +
                     " tokens does not match V " + p.V.value.shape());
  }
  if (model.label_names.size() != K) {
    throw ShapeError(std::to_string(model.label_names.size()) + " label names for " +
                     std::to_string(K) + " classes");
  }
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kCheckpointVersion);
  w.u32(K);
  w.u32(p.dim());
  w.u32(p.r);
  w.u32(p.vocab_size());
  w.u32(static_cast<std::uint32_t>(p.mode));
  for (const Param* param : p.params()) w.matrix(param->value);
  for (const auto& tok : model.vocab.tokens()) w.string(tok);
  for (const auto& name : model.label_names) w.string(name);
  w.u32(static_cast<std::uint32_t>(model.variant));
  return w.take();
}

Model deserialize(const std::vector<std::uint8_t>& bytes) {
  Reader r(bytes);
  if (std::memcmp(r.take(4), kMagic, 4) != 0) throw DataError("not a LEAM checkpoint (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  const std::size_t K = r.u32(), P = r.u32(), radius = r.u32(), vocab_size = r.u32();
  const std::uint32_t mode = r.u32();
  if (mode > 1) throw DataError("bad mode flag " + std::to_string(mode) + " in checkpoint");

  Model model;
  ModelParams& p = model.params;
  p.r = radius;
  p.mode = static_cast<Mode>(mode);
  p.V = Param(r.matrix(P, vocab_size));
  p.C = Param(r.matrix(P, K));
  p.W1 = Param(r.matrix(2 * radius + 1, 1));
  p.b1 = Param(r.matrix(K, 1));
  p.W2 = Param(r.matrix(K, P));
  p.b2 = Param(r.matrix(K, 1));
  std::vector<std::string> tokens;
  tokens.reserve(vocab_size);
  for (std::size_t i = 0; i < vocab_size; ++i) tokens.push_back(r.string());
  model.vocab = Vocabulary::from_tokens(std::move(tokens));
  for (std::size_t k = 0; k < K; ++k) model.label_names.push_back(r.string());
  const std::uint32_t variant = r.u32();
  if (variant > static_cast<std::uint32_t>(Variant::swem_max)) {
    throw DataError("bad variant code " + std::to_string(variant) + " in checkpoint");
  }
  model.variant = static_cast<Variant>(variant);
  if (!r.done()) throw DataError("trailing bytes after checkpoint");
  p.validate();
  return model;
}

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  const auto bytes = serialize(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return deserialize(bytes);
}

}  // namespace leam
