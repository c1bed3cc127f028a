#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "sampling.hpp"

namespace gsr {

// ---------------------------------------------------------------------------
// ILSR: alternating projections onto the bandlimited subspace and the set of
// signals agreeing with the samples.

struct IlsrConfig {
  /// Number of lowest graph frequencies kept.
  std::size_t cutoff = 1;
  std::size_t max_iters = 1000;
  double epsilon = 1e-9;
};

struct IlsrResult {
  GraphSignal signal;
  std::size_t iterations = 0;
  bool converged = false;
};

inline void check_ilsr(const IlsrConfig& c, std::size_t n) {
  if (c.cutoff < 1 || c.cutoff > n) throw InputError("IlsrConfig: cutoff must lie in [1, n]");
  if (c.max_iters < 1) throw InputError("IlsrConfig: max_iters must be >= 1");
  if (!(c.epsilon >= 0.0)) throw InputError("IlsrConfig: epsilon must be >= 0");
}

/// f_{k+1} = P(f_k + S(f_s - f_k)) from f_0 = 0, where P keeps the lowest
/// `cutoff` GFT coefficients. The output is exactly bandlimited: it is
/// assembled from the retained coefficients only.
inline IlsrResult ilsr_reconstruct(const GraphSignal& f_s, const SamplingMask& mask, const GftBasis& basis,
                                   const IlsrConfig& config) {
  const std::size_t n = basis.size();
  detail::require_same_size(n, f_s.size(), "ilsr_reconstruct");
  detail::require_same_size(n, mask.size(), "ilsr_reconstruct");
  check_ilsr(config, n);
  const auto low = basis.vectors().leftCols(static_cast<Eigen::Index>(config.cutoff));
  const Vector observed = subsample(f_s, mask).values;

  Vector coeffs = Vector::Zero(config.cutoff);
  Vector current = Vector::Zero(n);
  IlsrResult out;
  for (std::size_t k = 1; k <= config.max_iters; ++k) {
    Vector corrected = current;
    for (std::size_t i = 0; i < n; ++i)
      if (mask[i]) corrected[i] = observed[i];
    coeffs.noalias() = low.transpose() * corrected;
    Vector next = low * coeffs;
    const double delta = (next - current).norm();
    current.swap(next);
    out.iterations = k;
    if (delta <= config.epsilon) {
      out.converged = true;
      break;
    }
  }
  out.signal = GraphSignal(low * coeffs);
  return out;
}

/// Column-wise ilsr_reconstruct; same blocking scheme as the IMATGI batch.
inline Matrix ilsr_reconstruct_batch(const Matrix& fs, const std::vector<SamplingMask>& masks, const GftBasis& basis,
                                     const IlsrConfig& config) {
  const std::size_t n = basis.size();
  const std::size_t m = static_cast<std::size_t>(fs.cols());
  detail::require_same_size(n, static_cast<std::size_t>(fs.rows()), "ilsr_reconstruct_batch");
  detail::require_same_size(m, masks.size(), "ilsr_reconstruct_batch");
  check_ilsr(config, n);
  const auto low = basis.vectors().leftCols(static_cast<Eigen::Index>(config.cutoff));
  constexpr std::size_t kBlock = 64;
  Matrix out(n, m);
  parallel_for((m + kBlock - 1) / kBlock, [&](std::size_t b) {
    const std::size_t c0 = b * kBlock, width = std::min(kBlock, m - c0);
    Matrix observed = fs.middleCols(c0, width);
    for (std::size_t c = 0; c < width; ++c)
      for (std::size_t i = 0; i < n; ++i)
        if (!masks[c0 + c][i]) observed(i, c) = 0.0;
    Matrix current = Matrix::Zero(n, width);
    Matrix coeffs = Matrix::Zero(config.cutoff, width);
    std::vector<bool> active(width, true);
    Matrix corrected(n, width), next(n, width);
    for (std::size_t k = 1; k <= config.max_iters; ++k) {
      if (std::none_of(active.begin(), active.end(), [](bool a) { return a; })) break;
      corrected = current;
      for (std::size_t c = 0; c < width; ++c)
        for (std::size_t i = 0; i < n; ++i)
          if (masks[c0 + c][i]) corrected(i, c) = observed(i, c);
      Matrix new_coeffs = low.transpose() * corrected;
      next.noalias() = low * new_coeffs;
      for (std::size_t c = 0; c < width; ++c) {
        if (!active[c]) continue;
        const double delta = (next.col(c) - current.col(c)).norm();
        current.col(c) = next.col(c);
        coeffs.col(c) = new_coeffs.col(c);
        if (delta <= config.epsilon) active[c] = false;
      }
    }
    out.middleCols(c0, width) = low * coeffs;
  });
  return out;
}

// ---------------------------------------------------------------------------
// KNN: weighted mean of the k nearest kept vertices by shortest-path distance
// with edge length 1 / weight.

enum class KnnWeighting {
  /// w = 1 / d
  InverseDistance,
  /// w = 1 / d^2, i.e. the squared edge weight for a direct neighbour
  EdgeWeight,
};

struct KnnConfig {
  std::size_t k = 5;
  KnnWeighting weighting = KnnWeighting::InverseDistance;
};

struct KnnResult {
  GraphSignal signal;
  /// Vertices with no reachable kept vertex; filled with the mean of kept values.
  std::vector<std::size_t> fallback;
};

/// All-pairs shortest-path lengths (edge length 1 / weight); infinity when unreachable.
inline Matrix graph_distances(const Graph& g) {
  const std::size_t n = g.size();
  const auto adj = g.adjacency();
  Matrix dist = Matrix::Constant(n, n, std::numeric_limits<double>::infinity());
  parallel_for(n, [&](std::size_t src) {
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    std::vector<double> d(n, std::numeric_limits<double>::infinity());
    d[src] = 0.0;
    heap.emplace(0.0, src);
    while (!heap.empty()) {
      auto [du, u] = heap.top();
      heap.pop();
      if (du > d[u]) continue;
      for (auto [v, w] : adj[u]) {
        const double nd = du + 1.0 / w;
        if (nd < d[v]) {
          d[v] = nd;
          heap.emplace(nd, v);
        }
      }
    }
    for (std::size_t v = 0; v < n; ++v) dist(v, src) = d[v];
  });
  return dist;
}

inline double knn_weight(double d, KnnWeighting w) {
  return w == KnnWeighting::InverseDistance ? 1.0 / d : 1.0 / (d * d);
}

/// KNN interpolation against precomputed distances (see graph_distances).
inline KnnResult knn_interpolate(const GraphSignal& f_s, const SamplingMask& mask, const Matrix& distances,
                                 const KnnConfig& config) {
  const std::size_t n = f_s.size();
  detail::require_same_size(n, mask.size(), "knn_interpolate");
  detail::require_same_size(n, static_cast<std::size_t>(distances.rows()), "knn_interpolate");
  if (config.k < 1) throw InputError("KnnConfig: k must be >= 1");

  std::vector<std::size_t> kept;
  double kept_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask[i]) {
      kept.push_back(i);
      kept_sum += f_s[i];
    }
  }
  const double kept_mean = kept.empty() ? 0.0 : kept_sum / static_cast<double>(kept.size());

  KnnResult out{GraphSignal::zeros(n), {}};
  std::vector<std::pair<double, std::size_t>> cand;
  for (std::size_t v = 0; v < n; ++v) {
    if (mask[v]) {
      out.signal[v] = f_s[v];
      continue;
    }
    cand.clear();
    for (std::size_t u : kept)
      if (std::isfinite(distances(v, u))) cand.emplace_back(distances(v, u), u);
    if (cand.empty()) {
      out.signal[v] = kept_mean;
      out.fallback.push_back(v);
      continue;
    }
    const std::size_t take = std::min(config.k, cand.size());
    // pair ordering breaks distance ties by lower vertex index
    std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end());
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < take; ++j) {
      const double w = knn_weight(cand[j].first, config.weighting);
      num += w * f_s[cand[j].second];
      den += w;
    }
    out.signal[v] = num / den;
  }
  return out;
}

inline KnnResult knn_interpolate(const GraphSignal& f_s, const SamplingMask& mask, const Graph& g,
                                 const KnnConfig& config) {
  detail::require_same_size(g.size(), f_s.size(), "knn_interpolate");
  return knn_interpolate(f_s, mask, graph_distances(g), config);
}

}  // namespace gsr
