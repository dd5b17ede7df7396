#include "ue/bnn/serialize.hpp"

#include <array>
#include <fstream>

#include <fmt/format.h>

#include "ue/error.hpp"
#include "ue/nnet/serialize.hpp"

namespace ue::io {

namespace {

std::span<const double> view(const Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

Vector to_vector(const Tensor& t) {
  return Eigen::Map<const Vector>(t.data.data(), static_cast<Eigen::Index>(t.data.size()));
}

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  fn(out);
}

template <typename Fn>
auto read_file(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
  return fn(in);
}

}  // namespace

void save_mean_field(const bnn::MeanFieldPosterior& q, std::ostream& out) {
  q.validate();
  ContainerWriter w(out, ModelKind::kMeanField, q.layer_sizes, 2);
  const std::array<std::uint64_t, 1> shape = {static_cast<std::uint64_t>(q.mu.size())};
  w.write_tensor(shape, view(q.mu));
  w.write_tensor(shape, view(q.rho));
  w.finish();
}

bnn::MeanFieldPosterior load_mean_field(std::istream& in) {
  ContainerReader r = open_container(in, ModelKind::kMeanField);
  if (r.n_tensors() != 2) throw FormatError("mean-field container must hold two tensors");
  bnn::MeanFieldPosterior q;
  q.layer_sizes = r.layer_sizes();
  q.mu = to_vector(r.read_tensor());
  q.rho = to_vector(r.read_tensor());
  try {
    q.validate();
  } catch (const Error& e) {
    throw FormatError(fmt::format("mean-field container: {}", e.what()));
  }
  return q;
}

void save_mean_field(const bnn::MeanFieldPosterior& q, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { save_mean_field(q, out); });
}

bnn::MeanFieldPosterior load_mean_field(const std::filesystem::path& path) {
  return read_file(path, [](std::istream& in) { return load_mean_field(in); });
}

void save_chain(const bnn::PosteriorChain& c, std::ostream& out) {
  ContainerWriter w(out, ModelKind::kPosteriorChain, c.layer_sizes, static_cast<std::uint32_t>(3 + c.samples.size()));
  const std::array<double, 3> stats = {c.accept_rate, c.burn_in_accept_rate, static_cast<double>(c.samples.size())};
  const std::array<std::uint64_t, 1> stats_shape = {3};
  w.write_tensor(stats_shape, stats);
  const std::array<std::uint64_t, 1> e_shape = {c.energies.size()};
  w.write_tensor(e_shape, c.energies);
  std::vector<double> flags(c.accepted.begin(), c.accepted.end());
  const std::array<std::uint64_t, 1> f_shape = {flags.size()};
  w.write_tensor(f_shape, flags);
  for (const Vector& s : c.samples) {
    const std::array<std::uint64_t, 1> shape = {static_cast<std::uint64_t>(s.size())};
    w.write_tensor(shape, view(s));
  }
  w.finish();
}

bnn::PosteriorChain load_chain(std::istream& in) {
  ContainerReader r = open_container(in, ModelKind::kPosteriorChain);
  if (r.n_tensors() < 3) throw FormatError("chain container is missing its header tensors");
  bnn::PosteriorChain c;
  c.layer_sizes = r.layer_sizes();
  const Tensor stats = r.read_tensor();
  if (stats.data.size() != 3) throw FormatError("chain container: malformed statistics tensor");
  c.accept_rate = stats.data[0];
  c.burn_in_accept_rate = stats.data[1];
  const auto k = static_cast<std::size_t>(stats.data[2]);
  if (k + 3 != r.n_tensors()) throw FormatError("chain container: sample count mismatch");
  c.energies = r.read_tensor().data;
  for (double f : r.read_tensor().data) c.accepted.push_back(f != 0.0 ? 1 : 0);
  const std::size_t expected = c.layer_sizes.empty() ? 0 : nnet::parameter_count(c.layer_sizes);
  for (std::size_t i = 0; i < k; ++i) {
    Vector s = to_vector(r.read_tensor());
    if (expected != 0 && static_cast<std::size_t>(s.size()) != expected) {
      throw FormatError("chain container: sample does not match the architecture");
    }
    c.samples.push_back(std::move(s));
  }
  return c;
}

void save_chain(const bnn::PosteriorChain& c, const std::filesystem::path& path) {
  write_file(path, [&](std::ostream& out) { save_chain(c, out); });
}

bnn::PosteriorChain load_chain(const std::filesystem::path& path) {
  return read_file(path, [](std::istream& in) { return load_chain(in); });
}

}  // namespace ue::io
