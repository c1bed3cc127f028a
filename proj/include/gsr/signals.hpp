#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "rng.hpp"

namespace gsr {

struct SparseSpec {
  std::size_t k = 1;
  std::uint64_t seed = 0;
};

/// Indices of the k largest-magnitude entries; ties go to the lower index.
inline std::vector<std::size_t> top_k_indices(const Vector& v, std::size_t k) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), 0);
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      const double ma = std::abs(v[a]), mb = std::abs(v[b]);
                      return ma != mb ? ma > mb : a < b;
                    });
  idx.resize(k);
  return idx;
}

/// Draws U(0,1) vertex values, keeps the k largest GFT coefficients and
/// returns the inverse transform.
inline GraphSignal make_k_sparse(const GftBasis& basis, const SparseSpec& spec) {
  const std::size_t n = basis.size();
  if (spec.k < 1 || spec.k > n) throw InputError("make_k_sparse: k must lie in [1, n]");
  Rng rng(spec.seed);
  GraphSignal raw = GraphSignal::zeros(n);
  for (std::size_t i = 0; i < n; ++i) raw[i] = rng.uniform_open();
  const Vector spectrum = gft(basis, raw);
  Vector sparse = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t i : top_k_indices(spectrum, spec.k)) sparse[i] = spectrum[i];
  return igft(basis, sparse);
}

struct Snr {
  double ratio = 0.0;
  double db = 0.0;
  bool exact() const noexcept { return std::isinf(ratio); }
};

/// ||f||^2 / ||f - fhat||^2, and in decibels. A perfect estimate gives +inf.
inline Snr snr(const GraphSignal& reference, const GraphSignal& estimate) {
  detail::require_same_size(reference.size(), estimate.size(), "snr");
  const double energy = reference.values.squaredNorm();
  if (!(energy > 0.0)) throw InputError("snr: reference signal is zero");
  const double err = (reference.values - estimate.values).squaredNorm();
  if (err == 0.0) return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  const double ratio = energy / err;
  return {ratio, 10.0 * std::log10(ratio)};
}

inline double mse(const GraphSignal& reference, const GraphSignal& estimate) {
  detail::require_same_size(reference.size(), estimate.size(), "mse");
  if (reference.size() == 0) return 0.0;
  return (reference.values - estimate.values).squaredNorm() / static_cast<double>(reference.size());
}

/// Mean of the finite SNR values; infinite ones are only counted.
struct SnrSummary {
  double mean_ratio = 0.0;
  double mean_db = 0.0;
  std::size_t finite = 0;
  std::size_t infinite = 0;
};

inline SnrSummary summarize(const std::vector<Snr>& values) {
  SnrSummary s;
  for (const auto& v : values) {
    if (v.exact()) {
      ++s.infinite;
      continue;
    }
    s.mean_ratio += v.ratio;
    s.mean_db += v.db;
    ++s.finite;
  }
  if (s.finite > 0) {
    s.mean_ratio /= static_cast<double>(s.finite);
    s.mean_db /= static_cast<double>(s.finite);
  } else {
    s.mean_ratio = s.mean_db = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

}  // namespace gsr
