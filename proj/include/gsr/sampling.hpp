#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace gsr {

/// Known-vertex selector: the diagonal of the sampling matrix S, stored as flags.
struct SamplingMask {
  std::vector<bool> kept;

  SamplingMask() = default;
  explicit SamplingMask(std::vector<bool> k) : kept(std::move(k)) {}
  static SamplingMask all(std::size_t n) { return SamplingMask(std::vector<bool>(n, true)); }
  static SamplingMask none(std::size_t n) { return SamplingMask(std::vector<bool>(n, false)); }

  std::size_t size() const noexcept { return kept.size(); }
  bool operator[](std::size_t i) const { return kept[i]; }
  std::size_t count() const noexcept {
    std::size_t c = 0;
    for (bool b : kept) c += b;
    return c;
  }
};

inline void check_probability(double p, const char* where) {
  if (!(p > 0.0 && p <= 1.0)) throw InputError(std::string(where) + ": p must lie in (0, 1]");
}

/// Each vertex kept independently with probability p.
inline SamplingMask bernoulli_mask(std::size_t n, double p, std::uint64_t seed) {
  check_probability(p, "bernoulli_mask");
  Rng rng(seed);
  std::vector<bool> kept(n);
  for (std::size_t i = 0; i < n; ++i) kept[i] = rng.bernoulli(p);
  return SamplingMask(std::move(kept));
}

/// S f: values on kept vertices, zero elsewhere.
inline GraphSignal subsample(const GraphSignal& f, const SamplingMask& s) {
  detail::require_same_size(f.size(), s.size(), "subsample");
  GraphSignal out = GraphSignal::zeros(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    if (s[i]) out[i] = f[i];
  return out;
}

struct SubsampleStats {
  /// Monte Carlo mean of U^T S f.
  Vector mean_spectrum;
  /// Per-component sample variance of U^T S f (divisor trials - 1).
  Vector component_variance;
  /// Mean of ||U^T S f - p U^T f||^2.
  double trace_variance = 0.0;
  std::size_t trials = 0;
};

/// Monte Carlo estimates of the mean and spread of the sub-sampled spectrum
/// over fresh Bernoulli(p) masks; trial t uses seed derive_seed(seed, {t}).
inline SubsampleStats empirical_subsample_stats(const GraphSignal& f, const GftBasis& basis, double p,
                                                std::size_t trials, std::uint64_t seed) {
  check_probability(p, "empirical_subsample_stats");
  if (trials < 1) throw InputError("empirical_subsample_stats: trials must be >= 1");
  detail::require_same_size(basis.size(), f.size(), "empirical_subsample_stats");
  const std::size_t n = f.size();
  const Vector target = p * gft(basis, f);

  struct Acc {
    Vector sum, sum_sq;
    double trace = 0.0;
  };
  auto make = [n] { return Acc{Vector::Zero(n), Vector::Zero(n), 0.0}; };
  auto acc = ordered_reduce<Acc>(
      trials, 512, make,
      [&](Acc& a, std::size_t t) {
        const Vector fs_hat = gft(basis, subsample(f, bernoulli_mask(n, p, derive_seed(seed, {t}))));
        // Shifted accumulation around p*fhat keeps the variance well conditioned.
        const Vector dev = fs_hat - target;
        a.sum += dev;
        a.sum_sq += dev.cwiseProduct(dev);
        a.trace += dev.squaredNorm();
      },
      [](Acc& total, const Acc& part) {
        total.sum += part.sum;
        total.sum_sq += part.sum_sq;
        total.trace += part.trace;
      });

  const double tn = static_cast<double>(trials);
  SubsampleStats out;
  out.trials = trials;
  const Vector mean_dev = acc.sum / tn;
  out.mean_spectrum = target + mean_dev;
  out.trace_variance = acc.trace / tn;
  if (trials > 1)
    out.component_variance = (acc.sum_sq - tn * mean_dev.cwiseProduct(mean_dev)) / (tn - 1.0);
  else
    out.component_variance = Vector::Zero(n);
  out.component_variance = out.component_variance.cwiseMax(0.0);
  return out;
}

}  // namespace gsr
