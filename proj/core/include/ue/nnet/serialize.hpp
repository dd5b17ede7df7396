#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "ue/nnet/mlp.hpp"

namespace ue::io {

// Versioned little-endian container shared by every saved model:
//   "UEP1" | u32 version | u32 kind | u32 n_sizes | u64 sizes[n_sizes]
//   | u32 n_tensors | tensors
// Each tensor is u32 ndim | u64 dims[ndim] | f64 data (column-major).
enum class ModelKind : std::uint32_t { kMlp = 1, kMeanField = 2, kPosteriorChain = 3 };

inline constexpr std::uint32_t kContainerVersion = 1;

class ContainerWriter {
 public:
  ContainerWriter(std::ostream& out, ModelKind kind, std::span<const std::size_t> layer_sizes,
                  std::uint32_t n_tensors);
  void write_tensor(std::span<const std::uint64_t> shape, std::span<const double> data);
  // Throws IoError unless every announced tensor was written and the stream is good.
  void finish();

 private:
  std::ostream& out_;
  std::uint32_t remaining_;
};

struct Tensor {
  std::vector<std::uint64_t> shape;
  std::vector<double> data;
};

class ContainerReader {
 public:
  explicit ContainerReader(std::istream& in);
  ModelKind kind() const { return kind_; }
  const std::vector<std::size_t>& layer_sizes() const { return sizes_; }
  std::uint32_t n_tensors() const { return n_tensors_; }
  Tensor read_tensor();

 private:
  std::istream& in_;
  ModelKind kind_;
  std::vector<std::size_t> sizes_;
  std::uint32_t n_tensors_ = 0;
  std::uint32_t read_ = 0;
};

// Reads a container and checks its kind. Throws FormatError on mismatch.
ContainerReader open_container(std::istream& in, ModelKind expected);

void save_mlp(const nnet::MLPParams& p, std::ostream& out);
nnet::MLPParams load_mlp(std::istream& in);
void save_mlp(const nnet::MLPParams& p, const std::filesystem::path& path);
nnet::MLPParams load_mlp(const std::filesystem::path& path);

}  // namespace ue::io
