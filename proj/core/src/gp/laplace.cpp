#include "ue/gp/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ue/numerics/linalg.hpp"
#include "ue/numerics/parallel.hpp"

namespace ue::gp {

namespace {

constexpr Eigen::Index kPredictChunk = 256;
constexpr int kMaxHalvings = 40;
constexpr double kVarianceClamp = -1e-10;

Vector signed_labels(const Dataset& d) {
  if (!d.is_binary()) {
    throw PreconditionError("GP classification needs labels in {0, 1}");
  }
  Vector y(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) y(static_cast<Eigen::Index>(i)) = d.label(i) == 1 ? 1.0 : -1.0;
  return y;
}

struct Derivatives {
  double log_lik = 0.0;
  Vector grad;
  Vector W;
};

Derivatives derivatives(Link link, const Vector& y, const Vector& f) {
  Derivatives out;
  out.grad.resize(f.size());
  out.W.resize(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const PointLikelihood t = point_likelihood(link, y(i), f(i));
    out.log_lik += t.log_lik;
    out.grad(i) = t.grad;
    out.W(i) = t.neg_hess;
  }
  return out;
}

double objective(Link link, const Vector& y, const Vector& a, const Vector& f) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) ll += point_likelihood(link, y(i), f(i)).log_lik;
  return -0.5 * a.dot(f) + ll;
}

JitteredCholesky factor_b(const DenseMatrix& K, const Vector& sW) {
  DenseMatrix B = sW.asDiagonal() * K * sW.asDiagonal();
  B.diagonal().array() += 1.0;
  // Symmetrize away rounding from the two diagonal products.
  B = 0.5 * (B + B.transpose()).eval();
  return cholesky_with_jitter(B);
}

}  // namespace

LaplaceGPState laplace_fit(const Dataset& d, const KernelParams& params, const LaplaceOptions& options) {
  params.validate();
  if (d.size() == 0) throw PreconditionError("laplace_fit: empty dataset");
  if (!(options.tol > 0.0) || options.max_iter == 0) {
    throw PreconditionError("laplace_fit: tol must be positive and max_iter nonzero");
  }

  LaplaceGPState s;
  s.inputs = d.features();
  s.labels = signed_labels(d);
  s.params = params;
  s.link = options.link;
  const Link link = options.link;
  const Vector& y = s.labels;
  const DenseMatrix K = kernel_matrix(s.inputs, s.inputs, params);
  const Eigen::Index n = K.rows();

  Vector f = Vector::Zero(n);
  Vector a = Vector::Zero(n);
  double psi = objective(link, y, a, f);
  s.objective_trace.push_back(psi);

  bool converged = false;
  std::size_t it = 0;
  while (it < options.max_iter && !converged) {
    ++it;
    const Derivatives g = derivatives(link, y, f);
    const Vector sW = g.W.array().sqrt();
    const JitteredCholesky chol = factor_b(K, sW);
    const auto L = chol.lower.triangularView<Eigen::Lower>();

    const Vector b = g.W.cwiseProduct(f) + g.grad;
    const Vector c = L.solve(sW.cwiseProduct(K * b));
    const Vector a_full = b - sW.cwiseProduct(L.transpose().solve(c));
    const Vector delta = a_full - a;

    double step = 1.0;
    Vector a_new = a_full;
    Vector f_new = K * a_new;
    double psi_new = objective(link, y, a_new, f_new);
    int halvings = 0;
    while (!(psi_new >= psi) && halvings < kMaxHalvings) {
      step *= 0.5;
      ++halvings;
      a_new = a + step * delta;
      f_new = K * a_new;
      psi_new = objective(link, y, a_new, f_new);
    }
    if (!std::isfinite(psi_new)) {
      throw NonFinite(fmt::format("laplace_fit: objective became non-finite at iteration {}", it));
    }
    if (!(psi_new >= psi)) {
      // No ascent even for a vanishing step: we are at the mode to rounding.
      converged = true;
      break;
    }

    const double change = (f_new - f).cwiseAbs().maxCoeff();
    a = std::move(a_new);
    f = std::move(f_new);
    psi = psi_new;
    s.objective_trace.push_back(psi);
    converged = change < options.tol;
  }

  const Derivatives g = derivatives(link, y, f);
  const Vector sW = g.W.array().sqrt();
  JitteredCholesky chol = factor_b(K, sW);
  s.f_hat = f;
  s.grad = g.grad;
  s.W = g.W;
  s.chol_B = std::move(chol.lower);
  s.jitter = chol.jitter;
  s.iterations = it;
  s.log_marginal = -0.5 * a.dot(f) + g.log_lik - s.chol_B.diagonal().array().log().sum();

  if (!converged) {
    throw NoConvergence(
        fmt::format("laplace_fit: no convergence after {} Newton iterations (length_scale {})", it,
                    params.length_scale),
        std::make_shared<const LaplaceGPState>(std::move(s)));
  }
  return s;
}

HyperparamFit fit_hyperparams(const Dataset& d, std::span<const KernelParams> grid, const LaplaceOptions& options) {
  if (grid.empty()) throw PreconditionError("fit_hyperparams: empty grid");
  HyperparamFit best;
  best.log_marginals.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
  bool have = false;
  std::exception_ptr last_error;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    try {
      LaplaceGPState s = laplace_fit(d, grid[i], options);
      best.log_marginals[i] = s.log_marginal;
      if (!have || s.log_marginal > best.state.log_marginal) {
        best.params = grid[i];
        best.selected = i;
        best.state = std::move(s);
        have = true;
      }
    } catch (const NumericalError&) {
      last_error = std::current_exception();
    } catch (const NotPositiveDefinite&) {
      last_error = std::current_exception();
    }
  }
  if (!have) std::rethrow_exception(last_error);
  return best;
}

LatentMoments predict_latent(const LaplaceGPState& s, const Eigen::Ref<const Vector>& x) {
  if (x.size() != s.inputs.rows()) {
    throw DimensionMismatch(fmt::format("predict_latent: probe dim {} vs training dim {}", x.size(), s.inputs.rows()));
  }
  const Vector probe = x;
  const Vector ks = kernel_matrix(s.inputs, probe, s.params).col(0);
  const Vector sW = s.W.array().sqrt();
  const Vector v = s.chol_B.triangularView<Eigen::Lower>().solve(sW.cwiseProduct(ks));
  LatentMoments m;
  m.mean = ks.dot(s.grad);
  m.variance = s.params.signal_variance - v.squaredNorm();
  if (m.variance < 0.0) {
    if (m.variance < kVarianceClamp) {
      throw NumericalError(fmt::format("predict_latent: negative latent variance {}", m.variance));
    }
    m.variance = 0.0;
  }
  return m;
}

ProbVector predict_proba(const LaplaceGPState& s, const Eigen::Ref<const Vector>& x) {
  const LatentMoments m = predict_latent(s, x);
  const double pi = std::clamp(predictive_probability(s.link, m.mean, m.variance), 0.0, 1.0);
  return ProbVector({1.0 - pi, pi});
}

double gp_entropy(const LaplaceGPState& s, const Eigen::Ref<const Vector>& x) {
  return entropy(predict_proba(s, x));
}

BatchPrediction predict_batch(const LaplaceGPState& s, const DenseMatrix& probes) {
  if (probes.rows() != s.inputs.rows()) {
    throw DimensionMismatch(
        fmt::format("predict_batch: probe dim {} vs training dim {}", probes.rows(), s.inputs.rows()));
  }
  const Eigen::Index m = probes.cols();
  BatchPrediction out;
  out.mean.resize(m);
  out.variance.resize(m);
  out.p_class1.resize(m);
  out.k_max.resize(m);
  const Vector sW = s.W.array().sqrt();
  const auto n_chunks = static_cast<std::size_t>((m + kPredictChunk - 1) / kPredictChunk);
  parallel_chunks(n_chunks, evaluation_threads(), [&](std::size_t c) {
    const Eigen::Index begin = static_cast<Eigen::Index>(c) * kPredictChunk;
    const Eigen::Index len = std::min(kPredictChunk, m - begin);
    const DenseMatrix ks = kernel_matrix(s.inputs, probes.middleCols(begin, len), s.params);
    const DenseMatrix v = s.chol_B.triangularView<Eigen::Lower>().solve(sW.asDiagonal() * ks);
    for (Eigen::Index j = 0; j < len; ++j) {
      const Eigen::Index o = begin + j;
      out.mean(o) = ks.col(j).dot(s.grad);
      double var = s.params.signal_variance - v.col(j).squaredNorm();
      if (var < 0.0) {
        if (var < kVarianceClamp) {
          throw NumericalError(fmt::format("predict_batch: negative latent variance {}", var));
        }
        var = 0.0;
      }
      out.variance(o) = var;
      out.p_class1(o) = std::clamp(predictive_probability(s.link, out.mean(o), var), 0.0, 1.0);
      out.k_max(o) = ks.col(j).cwiseAbs().maxCoeff();
    }
  });
  return out;
}

}  // namespace ue::gp
