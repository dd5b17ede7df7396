#include "ue/nnet/serialize.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "ue/error.hpp"

namespace ue::io {

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 4> kMagic = {'U', 'E', 'P', '1'};
constexpr std::uint32_t kMaxRank = 8;

template <typename T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw FormatError("model container truncated");
  return v;
}

}  // namespace

ContainerWriter::ContainerWriter(std::ostream& out, ModelKind kind, std::span<const std::size_t> layer_sizes,
                                 std::uint32_t n_tensors)
    : out_(out), remaining_(n_tensors) {
  out_.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out_, kContainerVersion);
  put<std::uint32_t>(out_, static_cast<std::uint32_t>(kind));
  put<std::uint32_t>(out_, static_cast<std::uint32_t>(layer_sizes.size()));
  for (std::size_t s : layer_sizes) put<std::uint64_t>(out_, s);
  put<std::uint32_t>(out_, n_tensors);
}

void ContainerWriter::write_tensor(std::span<const std::uint64_t> shape, std::span<const double> data) {
  if (remaining_ == 0) throw PreconditionError("container: more tensors written than announced");
  std::uint64_t count = 1;
  for (auto d : shape) count *= d;
  if (count != data.size()) {
    throw DimensionMismatch(fmt::format("container: tensor shape holds {} values, got {}", count, data.size()));
  }
  put<std::uint32_t>(out_, static_cast<std::uint32_t>(shape.size()));
  for (auto d : shape) put<std::uint64_t>(out_, d);
  out_.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size() * sizeof(double)));
  --remaining_;
}

void ContainerWriter::finish() {
  if (remaining_ != 0) throw PreconditionError(fmt::format("container: {} announced tensors missing", remaining_));
  out_.flush();
  if (!out_) throw IoError("container: write failed");
}

ContainerReader::ContainerReader(std::istream& in) : in_(in) {
  std::array<char, 4> magic{};
  in_.read(magic.data(), magic.size());
  if (!in_ || magic != kMagic) throw FormatError("not a model container (bad magic)");
  const auto version = get<std::uint32_t>(in_);
  if (version != kContainerVersion) throw FormatError(fmt::format("unsupported container version {}", version));
  const auto kind = get<std::uint32_t>(in_);
  if (kind < 1 || kind > 3) throw FormatError(fmt::format("unknown model kind {}", kind));
  kind_ = static_cast<ModelKind>(kind);
  const auto n_sizes = get<std::uint32_t>(in_);
  if (n_sizes > 1024) throw FormatError("implausible layer count");
  for (std::uint32_t i = 0; i < n_sizes; ++i) sizes_.push_back(static_cast<std::size_t>(get<std::uint64_t>(in_)));
  n_tensors_ = get<std::uint32_t>(in_);
}

Tensor ContainerReader::read_tensor() {
  if (read_ >= n_tensors_) throw FormatError("container: no tensors left");
  Tensor t;
  const auto rank = get<std::uint32_t>(in_);
  if (rank > kMaxRank) throw FormatError(fmt::format("container: tensor rank {} too large", rank));
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    t.shape.push_back(get<std::uint64_t>(in_));
    if (t.shape.back() != 0 && count > (std::uint64_t{1} << 40) / t.shape.back()) {
      throw FormatError("container: tensor too large");
    }
    count *= t.shape.back();
  }
  t.data.resize(count);
  in_.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in_) throw FormatError("model container truncated");
  ++read_;
  return t;
}

ContainerReader open_container(std::istream& in, ModelKind expected) {
  ContainerReader r(in);
  if (r.kind() != expected) {
    throw FormatError(fmt::format("model container holds kind {}, expected {}", static_cast<std::uint32_t>(r.kind()),
                                  static_cast<std::uint32_t>(expected)));
  }
  return r;
}

void save_mlp(const nnet::MLPParams& p, std::ostream& out) {
  ContainerWriter w(out, ModelKind::kMlp, p.layer_sizes(), static_cast<std::uint32_t>(2 * p.n_layers()));
  for (std::size_t l = 0; l < p.n_layers(); ++l) {
    const auto wt = p.weights(l);
    const auto b = p.biases(l);
    const std::array<std::uint64_t, 2> ws = {static_cast<std::uint64_t>(wt.rows()),
                                             static_cast<std::uint64_t>(wt.cols())};
    const std::array<std::uint64_t, 1> bs = {static_cast<std::uint64_t>(b.size())};
    w.write_tensor(ws, {wt.data(), static_cast<std::size_t>(wt.size())});
    w.write_tensor(bs, {b.data(), static_cast<std::size_t>(b.size())});
  }
  w.finish();
}

nnet::MLPParams load_mlp(std::istream& in) {
  ContainerReader r = open_container(in, ModelKind::kMlp);
  nnet::MLPParams p(r.layer_sizes());
  if (r.n_tensors() != 2 * p.n_layers()) throw FormatError("MLP container has the wrong tensor count");
  for (std::size_t l = 0; l < p.n_layers(); ++l) {
    auto w = p.weights(l);
    auto b = p.biases(l);
    const Tensor tw = r.read_tensor();
    const Tensor tb = r.read_tensor();
    if (tw.shape != std::vector<std::uint64_t>{static_cast<std::uint64_t>(w.rows()), static_cast<std::uint64_t>(w.cols())} ||
        tb.shape != std::vector<std::uint64_t>{static_cast<std::uint64_t>(b.size())}) {
      throw FormatError(fmt::format("MLP container: layer {} tensor shapes do not match the architecture", l));
    }
    std::memcpy(w.data(), tw.data.data(), tw.data.size() * sizeof(double));
    std::memcpy(b.data(), tb.data.data(), tb.data.size() * sizeof(double));
  }
  return p;
}

void save_mlp(const nnet::MLPParams& p, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  save_mlp(p, out);
}

nnet::MLPParams load_mlp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
  return load_mlp(in);
}

}  // namespace ue::io
