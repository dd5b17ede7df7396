#include "ue/datasets/dataset.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ue/error.hpp"
#include "ue/numerics/rng.hpp"

namespace ue {

std::string_view to_string(DataSource source) {
  switch (source) {
    case DataSource::kToy2d:
      return "toy2d";
    case DataSource::kMnist:
      return "mnist";
    case DataSource::kProbe:
      return "probe";
  }
  return "unknown";
}

Dataset::Dataset(DenseMatrix features, std::vector<int> labels, DataSource source)
    : features_(std::move(features)), labels_(std::move(labels)), source_(source) {
  if (labels_.empty()) throw PreconditionError("Dataset: no samples");
  if (static_cast<std::size_t>(features_.cols()) != labels_.size()) {
    throw DimensionMismatch(
        fmt::format("Dataset: {} feature columns but {} labels", features_.cols(), labels_.size()));
  }
  if (features_.rows() == 0) throw PreconditionError("Dataset: zero-dimensional features");
  for (int y : labels_) {
    if (y < 0) throw PreconditionError(fmt::format("Dataset: negative label {}", y));
  }
}

bool Dataset::is_binary() const {
  return std::all_of(labels_.begin(), labels_.end(), [](int y) { return y == 0 || y == 1; });
}

std::vector<int> Dataset::classes() const {
  std::vector<int> out = labels_;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> Dataset::indices_of(int label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == label) out.push_back(i);
  }
  return out;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  DenseMatrix features(features_.rows(), static_cast<Eigen::Index>(indices.size()));
  std::vector<int> labels(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    if (indices[j] >= size()) throw PreconditionError("Dataset::subset: index out of range");
    features.col(static_cast<Eigen::Index>(j)) = sample(indices[j]);
    labels[j] = labels_[indices[j]];
  }
  return Dataset(std::move(features), std::move(labels), source_);
}

Dataset make_toy2d(std::size_t n_per_class, std::uint64_t seed) {
  if (n_per_class < 1) throw PreconditionError("make_toy2d: n_per_class must be >= 1");
  const double stddev = std::sqrt(0.1);
  RngStream rng(seed);
  const auto n = static_cast<Eigen::Index>(2 * n_per_class);
  DenseMatrix x(2, n);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool positive = i >= static_cast<Eigen::Index>(n_per_class);
    const double mean = positive ? 2.0 : -2.0;
    x(0, i) = mean + stddev * rng.normal();
    x(1, i) = mean + stddev * rng.normal();
    y[static_cast<std::size_t>(i)] = positive ? 1 : 0;
  }
  return Dataset(std::move(x), std::move(y), DataSource::kToy2d);
}

DenseMatrix grid2d(double xmin, double xmax, double ymin, double ymax, std::size_t resolution) {
  if (!(xmax > xmin) || !(ymax > ymin)) throw PreconditionError("grid2d: empty window");
  if (resolution < 2) throw PreconditionError("grid2d: resolution must be >= 2");
  const auto r = static_cast<Eigen::Index>(resolution);
  const double denom = static_cast<double>(resolution - 1);
  auto at = [denom](double lo, double hi, Eigen::Index k, Eigen::Index last) {
    if (k == 0) return lo;
    if (k == last) return hi;
    return lo + (hi - lo) * (static_cast<double>(k) / denom);
  };
  DenseMatrix out(2, r * r);
  for (Eigen::Index iy = 0; iy < r; ++iy) {
    for (Eigen::Index ix = 0; ix < r; ++ix) {
      out(0, iy * r + ix) = at(xmin, xmax, ix, r - 1);
      out(1, iy * r + ix) = at(ymin, ymax, iy, r - 1);
    }
  }
  return out;
}

Dataset filter_classes(const Dataset& d, std::span<const int> keep) {
  if (keep.empty()) throw PreconditionError("filter_classes: empty keep set");
  std::vector<int> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::size_t> idx;
  std::vector<int> labels;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), d.label(i));
    if (it != sorted.end() && *it == d.label(i)) {
      idx.push_back(i);
      labels.push_back(static_cast<int>(it - sorted.begin()));
    }
  }
  if (idx.empty()) throw EmptyResult("filter_classes: no sample carries a kept label");
  DenseMatrix features(d.dim(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) features.col(static_cast<Eigen::Index>(j)) = d.sample(idx[j]);
  return Dataset(std::move(features), std::move(labels), d.source());
}

Dataset subsample(const Dataset& d, std::size_t n, std::uint64_t seed) {
  if (n >= d.size()) return d;
  std::vector<std::size_t> perm(d.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  RngStream rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(perm.size() - i));
    std::swap(perm[i], perm[j]);
  }
  perm.resize(n);
  std::sort(perm.begin(), perm.end());
  return d.subset(perm);
}

}  // namespace ue
