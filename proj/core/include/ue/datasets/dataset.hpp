#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "ue/numerics/types.hpp"

namespace ue {

enum class DataSource { kToy2d, kMnist, kProbe };

std::string_view to_string(DataSource source);

// Labeled samples stored column-wise: features() is (dim x size). Labels are
// non-negative class ids; MNIST loads with 0..9 and filter_classes() remaps
// to the binary {0, 1} problems every model trains on.
class Dataset {
 public:
  Dataset(DenseMatrix features, std::vector<int> labels, DataSource source);

  std::size_t size() const { return labels_.size(); }
  Eigen::Index dim() const { return features_.rows(); }
  const DenseMatrix& features() const { return features_; }
  auto sample(std::size_t i) const { return features_.col(static_cast<Eigen::Index>(i)); }
  int label(std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  DataSource source() const { return source_; }

  bool is_binary() const;
  // Sorted distinct labels.
  std::vector<int> classes() const;
  std::vector<std::size_t> indices_of(int label) const;
  // Samples at `indices`, in that order.
  Dataset subset(std::span<const std::size_t> indices) const;

 private:
  DenseMatrix features_;
  std::vector<int> labels_;
  DataSource source_;
};

// Two isotropic Gaussian blobs, variance 0.1 per coordinate: class 0 about
// (-2, -2), class 1 about (2, 2). Class 0 samples come first.
Dataset make_toy2d(std::size_t n_per_class, std::uint64_t seed);

// resolution^2 points on [xmin, xmax] x [ymin, ymax], x varying fastest,
// returned as a (2 x resolution^2) matrix. Both end points are included.
DenseMatrix grid2d(double xmin, double xmax, double ymin, double ymax, std::size_t resolution);

// MNIST IDX pair. Pixels are divided by 255; each image becomes one column.
Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path);

// Keeps samples whose label is in `keep` and relabels them by rank within
// `keep` (lowest kept label -> 0). Order is preserved.
Dataset filter_classes(const Dataset& d, std::span<const int> keep);

// n samples drawn uniformly without replacement, returned in their original
// order. n >= size() returns the dataset unchanged.
Dataset subsample(const Dataset& d, std::size_t n, std::uint64_t seed);

}  // namespace ue
