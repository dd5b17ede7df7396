#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ue/datasets/dataset.hpp"
#include "ue/error.hpp"
#include "ue/gp/kernel.hpp"
#include "ue/gp/likelihood.hpp"
#include "ue/numerics/prob.hpp"
#include "ue/numerics/types.hpp"

namespace ue::gp {

// Binary GP classifier under the Laplace approximation. Labels are stored
// recoded to {-1, +1}; the public API speaks {0, 1}.
struct LaplaceGPState {
  DenseMatrix inputs;  // dim x n
  Vector labels;       // -1 / +1
  KernelParams params;
  Link link = Link::kProbit;
  Vector f_hat;      // posterior mode of the latent values
  Vector grad;       // d log p(y|f) / df at f_hat
  Vector W;          // -d^2 log p(y|f) / df^2 at f_hat (diagonal)
  DenseMatrix chol_B;  // lower factor of I + W^1/2 K W^1/2
  double log_marginal = 0.0;
  double jitter = 0.0;  // diagonal jitter the factorization of B needed
  std::size_t iterations = 0;
  // Newton objective log p(y|f) - f^T K^-1 f / 2 after each accepted step
  // (index 0 is the starting point f = 0).
  std::vector<double> objective_trace;

  std::size_t size() const { return static_cast<std::size_t>(labels.size()); }
};

// Carries the last Newton iterate when laplace_fit runs out of iterations.
class NoConvergence : public NumericalError {
 public:
  NoConvergence(const std::string& what, std::shared_ptr<const LaplaceGPState> last)
      : NumericalError(what), last_(std::move(last)) {}
  const LaplaceGPState& last_iterate() const { return *last_; }

 private:
  std::shared_ptr<const LaplaceGPState> last_;
};

struct LaplaceOptions {
  Link link = Link::kProbit;
  double tol = 1e-6;  // on max |f_new - f_old|
  std::size_t max_iter = 100;
};

// Newton mode finding with step halving whenever a full step would lower
// the objective.
LaplaceGPState laplace_fit(const Dataset& d, const KernelParams& params, const LaplaceOptions& options = {});

struct HyperparamFit {
  KernelParams params;
  LaplaceGPState state;
  std::size_t selected = 0;
  // One entry per grid point; NaN where the fit failed.
  std::vector<double> log_marginals;
};

// Highest Laplace log marginal likelihood over the grid; ties go to the
// earliest grid point. Rethrows the last failure only if every point fails.
HyperparamFit fit_hyperparams(const Dataset& d, std::span<const KernelParams> grid, const LaplaceOptions& options = {});

struct LatentMoments {
  double mean = 0.0;
  double variance = 0.0;
};

// mean = k*^T grad, variance = k(x*, x*) - k*^T (K + W^-1)^-1 k*, evaluated
// through the factor of B. Tiny negative variances (> -1e-10) clamp to 0.
LatentMoments predict_latent(const LaplaceGPState& s, const Eigen::Ref<const Vector>& x);

// [1 - pi, pi] with pi the link integrated against the latent Gaussian.
ProbVector predict_proba(const LaplaceGPState& s, const Eigen::Ref<const Vector>& x);

double gp_entropy(const LaplaceGPState& s, const Eigen::Ref<const Vector>& x);

struct BatchPrediction {
  Vector mean;
  Vector variance;
  Vector p_class1;
  Vector k_max;  // max_i |k(x_i, x*)|, the similarity to the closest training input
};

// Column-wise predictions for a (dim x m) probe matrix. Evaluated in fixed
// chunks across evaluation_threads(); results do not depend on the thread
// count.
BatchPrediction predict_batch(const LaplaceGPState& s, const DenseMatrix& probes);

}  // namespace ue::gp
