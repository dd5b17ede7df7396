#include <cstdint>
#include <fstream>
#include <iterator>
#include <vector>

#include <fmt/format.h>

#include "ue/datasets/dataset.hpp"
#include "ue/error.hpp"

namespace ue {

namespace {

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError(fmt::format("read failed for '{}'", path.string()));
  return bytes;
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& b, std::size_t offset, const std::filesystem::path& path) {
  if (offset + 4 > b.size()) throw FormatError(fmt::format("'{}': truncated header", path.string()));
  return (std::uint32_t{b[offset]} << 24) | (std::uint32_t{b[offset + 1]} << 16) |
         (std::uint32_t{b[offset + 2]} << 8) | std::uint32_t{b[offset + 3]};
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
  const auto images = read_file(images_path);
  const auto labels = read_file(labels_path);

  if (const auto magic = read_be32(images, 0, images_path); magic != kImagesMagic) {
    throw FormatError(fmt::format("'{}': bad magic 0x{:08x}, expected 0x{:08x}", images_path.string(), magic, kImagesMagic));
  }
  if (const auto magic = read_be32(labels, 0, labels_path); magic != kLabelsMagic) {
    throw FormatError(fmt::format("'{}': bad magic 0x{:08x}, expected 0x{:08x}", labels_path.string(), magic, kLabelsMagic));
  }
  const std::size_t n_images = read_be32(images, 4, images_path);
  const std::size_t rows = read_be32(images, 8, images_path);
  const std::size_t cols = read_be32(images, 12, images_path);
  const std::size_t n_labels = read_be32(labels, 4, labels_path);
  if (n_images != n_labels) {
    throw FormatError(fmt::format("image count {} does not match label count {}", n_images, n_labels));
  }
  if (n_images == 0 || rows == 0 || cols == 0) throw FormatError("IDX file declares an empty payload");
  const std::size_t pixels = rows * cols;
  if (images.size() != 16 + n_images * pixels) {
    throw FormatError(fmt::format("'{}': payload is {} bytes, header implies {}", images_path.string(),
                                  images.size() - 16, n_images * pixels));
  }
  if (labels.size() != 8 + n_labels) {
    throw FormatError(fmt::format("'{}': payload is {} bytes, header implies {}", labels_path.string(),
                                  labels.size() - 8, n_labels));
  }

  DenseMatrix features(static_cast<Eigen::Index>(pixels), static_cast<Eigen::Index>(n_images));
  const std::uint8_t* src = images.data() + 16;
  double* dst = features.data();
  for (std::size_t k = 0; k < n_images * pixels; ++k) dst[k] = static_cast<double>(src[k]) / 255.0;
  std::vector<int> y(labels.begin() + 8, labels.end());
  return Dataset(std::move(features), std::move(y), DataSource::kMnist);
}

}  // namespace ue
