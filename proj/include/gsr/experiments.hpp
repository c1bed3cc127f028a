#pragma once

// Batch experiment drivers behind the command line tool: the synthetic
// sparsity/sampling-rate sweep and the Monte Carlo probes.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "graph.hpp"
#include "imatgi.hpp"
#include "parallel.hpp"
#include "sampling.hpp"
#include "signals.hpp"

namespace gsr::experiments {

struct SynthParams {
  static ImatgiConfig default_config() {
    ImatgiConfig c;
    c.alpha = 0.3;
    return c;
  }

  std::size_t n = 1000;
  std::vector<double> p_list{0.45, 0.50, 0.55, 0.60, 0.65};
  std::vector<double> sparsity_list{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  std::size_t trials = 100;
  ImatgiConfig imatgi = default_config();
  std::uint64_t seed = 1;
  /// One graph for every trial instead of a fresh graph per trial.
  bool fixed_graph = false;
  GeometricGraphParams graph;

  void validate() const {
    if (n < 2) throw InputError("synth: n must be >= 2");
    if (trials < 1) throw InputError("synth: trials must be >= 1");
    if (p_list.empty() || sparsity_list.empty()) throw InputError("synth: empty p or sparsity list");
    for (double p : p_list) check_probability(p, "synth");
    for (double s : sparsity_list)
      if (!(s > 0.0 && s <= 1.0)) throw InputError("synth: sparsity must lie in (0, 1]");
    imatgi.validate();
  }
  /// Number of retained GFT coefficients for a sparsity factor.
  std::size_t sparse_k(double sparsity) const {
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(sparsity * static_cast<double>(n))), 1, n);
  }
};

struct SynthRow {
  double p = 0.0;
  double sparsity = 0.0;
  std::size_t trial = 0;
  Snr snr;
  std::size_t iters_used = 0;
};

struct SynthCell {
  double p = 0.0;
  double sparsity = 0.0;
  SnrSummary summary;
};

struct SynthResult {
  std::vector<SynthRow> rows;
  std::vector<SynthCell> cells;

  const SynthCell& cell(double p, double sparsity) const {
    for (const auto& c : cells)
      if (std::abs(c.p - p) < 1e-12 && std::abs(c.sparsity - sparsity) < 1e-12) return c;
    throw InputError("synth: no such cell");
  }
};

/// For every trial: build (or reuse) a random geometric graph, draw one
/// k-sparse signal per sparsity level (shared across sampling rates), sample
/// it with a Bernoulli(p) mask per cell and reconstruct. Rows come out
/// ordered by (p, sparsity, trial).
inline SynthResult run_synth(const SynthParams& params) {
  params.validate();
  const std::size_t np = params.p_list.size(), ns = params.sparsity_list.size();
  const std::size_t cells = np * ns;
  std::vector<SynthRow> grid(cells * params.trials);

  std::optional<GftBasis> shared;
  if (params.fixed_graph) shared.emplace(gft_basis(random_geometric_graph(params.n, derive_seed(params.seed, {1, 0}), params.graph)));

  parallel_for(params.trials, [&](std::size_t t) {
    std::optional<GftBasis> own;
    if (!shared) own.emplace(gft_basis(random_geometric_graph(params.n, derive_seed(params.seed, {1, t + 1}), params.graph)));
    const GftBasis& basis = shared ? *shared : *own;

    std::vector<GraphSignal> truth;
    for (std::size_t si = 0; si < ns; ++si)
      truth.push_back(make_k_sparse(basis, {params.sparse_k(params.sparsity_list[si]), derive_seed(params.seed, {2, t, si})}));

    Matrix fs(params.n, cells);
    std::vector<SamplingMask> masks;
    for (std::size_t pi = 0; pi < np; ++pi) {
      for (std::size_t si = 0; si < ns; ++si) {
        masks.push_back(bernoulli_mask(params.n, params.p_list[pi], derive_seed(params.seed, {3, t, pi, si})));
        fs.col(pi * ns + si) = subsample(truth[si], masks.back()).values;
      }
    }
    std::vector<std::size_t> iters;
    const Matrix rec = imatgi_reconstruct_batch(fs, masks, basis, params.imatgi, &iters);
    for (std::size_t pi = 0; pi < np; ++pi) {
      for (std::size_t si = 0; si < ns; ++si) {
        const std::size_t c = pi * ns + si;
        grid[c * params.trials + t] = {params.p_list[pi], params.sparsity_list[si], t,
                                       snr(truth[si], GraphSignal(rec.col(c))), iters[c]};
      }
    }
  });

  SynthResult out;
  out.rows = std::move(grid);
  for (std::size_t c = 0; c < cells; ++c) {
    std::vector<Snr> values;
    for (std::size_t t = 0; t < params.trials; ++t) values.push_back(out.rows[c * params.trials + t].snr);
    out.cells.push_back({params.p_list[c / ns], params.sparsity_list[c % ns], summarize(values)});
  }
  return out;
}

inline void write_synth_rows(std::ostream& os, const SynthResult& r) {
  os << "#schema=v1\n";
  os << "p,sparsity,trial,snr_ratio,snr_db,iters_used\n";
  os << std::setprecision(10);
  for (const auto& row : r.rows)
    os << row.p << ',' << row.sparsity << ',' << row.trial << ',' << row.snr.ratio << ',' << row.snr.db << ','
       << row.iters_used << '\n';
}

inline void write_synth_aggregate(std::ostream& os, const SynthResult& r) {
  os << "#schema=v1\n";
  os << "p,sparsity,mean_snr_ratio,mean_snr_db,finite_trials,infinite_trials\n";
  os << std::setprecision(10);
  for (const auto& c : r.cells)
    os << c.p << ',' << c.sparsity << ',' << c.summary.mean_ratio << ',' << c.summary.mean_db << ','
       << c.summary.finite << ',' << c.summary.infinite << '\n';
}

// ---------------------------------------------------------------------------
// Probes

struct ProbeRow {
  std::string quantity;
  std::size_t k = 0;
  long index = -1;
  double estimate = 0.0;
  double theory = std::numeric_limits<double>::quiet_NaN();
  /// 1 pass, 0 fail, -1 not assessed.
  int pass = -1;
};

struct ProbeResult {
  std::string kind;
  std::vector<ProbeRow> rows;
  bool pass = true;
};

struct ProbeParams {
  std::size_t n = 64;
  double p = 0.5;
  double lambda = 1.0;
  std::size_t trials = 100000;
  std::size_t iters = 10;
  /// Fraction of retained GFT coefficients in the probe signal (1 = dense).
  double sparsity = 1.0;
  ImatgiConfig imatgi;
  /// Variance probe threshold guard; 0 disables it.
  double gamma = 2.0;
  MaskModel masks = MaskModel::Resampled;
  std::uint64_t seed = 1;
};

struct ProbeFixture {
  GftBasis basis;
  GraphSignal signal;
};

inline ProbeFixture make_probe_fixture(const ProbeParams& params) {
  GftBasis basis = gft_basis(random_geometric_graph(params.n, derive_seed(params.seed, {10})));
  const std::size_t k = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(params.sparsity * static_cast<double>(params.n))), 1, params.n);
  GraphSignal f = make_k_sparse(basis, {k, derive_seed(params.seed, {11})});
  return {std::move(basis), std::move(f)};
}

/// Mean spectrum within 4 standard errors of p*fhat on at least 99% of
/// components, and trace variance within 5% of (p - p^2) * ||f||^2.
inline ProbeResult probe_subsampling(const ProbeParams& params) {
  auto fx = make_probe_fixture(params);
  const auto stats = empirical_subsample_stats(fx.signal, fx.basis, params.p, params.trials, derive_seed(params.seed, {12}));
  const Vector expected = params.p * gft(fx.basis, fx.signal);
  ProbeResult out{"lemma1", {}, true};
  std::size_t within = 0;
  for (Eigen::Index i = 0; i < expected.size(); ++i) {
    const double se = std::sqrt(stats.component_variance[i] / static_cast<double>(stats.trials));
    const bool ok = std::abs(stats.mean_spectrum[i] - expected[i]) <= 4.0 * se + 1e-15;
    within += ok;
    out.rows.push_back({"mean_spectrum", 0, static_cast<long>(i), stats.mean_spectrum[i], expected[i], ok ? 1 : 0});
  }
  const bool mean_ok = static_cast<double>(within) >= 0.99 * static_cast<double>(expected.size());
  const double theory = (params.p - params.p * params.p) * fx.signal.values.squaredNorm();
  const bool var_ok = theory == 0.0 ? stats.trace_variance == 0.0
                                    : std::abs(stats.trace_variance / theory - 1.0) <= 0.05;
  out.rows.push_back({"mean_within_4se_fraction", 0, -1, static_cast<double>(within) / expected.size(), 0.99, mean_ok ? 1 : 0});
  out.rows.push_back({"trace_variance", 0, -1, stats.trace_variance, theory, var_ok ? 1 : 0});
  out.pass = mean_ok && var_ok;
  return out;
}

/// Componentwise mean-error ratios against 1 - lambda*p (10% tolerance on
/// components resolved to a quarter of it).
inline ProbeResult probe_contraction(const ProbeParams& params) {
  auto fx = make_probe_fixture(params);
  const auto probe = contraction_probe(fx.signal, fx.basis, params.p, params.lambda, params.trials, params.iters,
                                       derive_seed(params.seed, {13}), params.masks);
  ProbeResult out{"contraction", {}, true};
  for (std::size_t k = 0; k < probe.ratios.size(); ++k) {
    for (Eigen::Index i = 0; i < probe.ratios[k].size(); ++i) {
      int pass = -1;
      if (ratio_resolved(probe, k, i, 0.1))
        pass = std::abs(probe.ratios[k][i] - probe.expected_ratio) <= 0.1 * std::abs(probe.expected_ratio) ? 1 : 0;
      out.rows.push_back({"ratio", k + 1, static_cast<long>(i), probe.ratios[k][i], probe.expected_ratio, pass});
    }
  }
  for (std::size_t k = 0; k < probe.ratios.size(); ++k)
    out.rows.push_back({"pooled_ratio", k + 1, -1, probe.pooled_ratio(k), probe.expected_ratio, -1});
  for (std::size_t k = 0; k < probe.mean_error.size(); ++k)
    out.rows.push_back({"mean_error_norm", k + 1, -1, probe.mean_error[k].norm(), std::numeric_limits<double>::quiet_NaN(), -1});
  out.pass = check_contraction(probe, 0.1).pass();
  return out;
}

/// Per-iterate sigma^2 and MSE; pass when the MSE never rises by more than
/// two paired standard errors.
inline ProbeResult probe_variance(const ProbeParams& params) {
  auto fx = make_probe_fixture(params);
  ImatgiConfig cfg = params.imatgi;
  cfg.max_iters = params.iters;
  std::optional<VarianceGuard> guard;
  if (params.gamma > 0) guard = VarianceGuard{params.gamma};
  const auto probe = variance_probe(fx.signal, fx.basis, cfg, params.p, params.trials, derive_seed(params.seed, {14}), guard,
                                    params.masks);
  ProbeResult out{"variance", {}, true};
  for (std::size_t k = 0; k < probe.mse.size(); ++k) {
    const bool step_ok = k == 0 || probe.mse[k] - probe.mse[k - 1] <= 2.0 * probe.mse_step_se[k];
    out.rows.push_back({"sigma2", k + 1, -1, probe.sigma2[k], std::numeric_limits<double>::quiet_NaN(), -1});
    out.rows.push_back({"mse", k + 1, -1, probe.mse[k], std::numeric_limits<double>::quiet_NaN(), step_ok ? 1 : 0});
  }
  out.pass = probe.mse_non_increasing(2.0);
  out.rows.push_back({"mse_non_increasing", 0, -1, out.pass ? 1.0 : 0.0, 1.0, out.pass ? 1 : 0});
  return out;
}

inline void write_probe_csv(std::ostream& os, const ProbeResult& r) {
  os << "#schema=v1\n";
  os << "kind,quantity,k,index,estimate,theory,pass\n";
  os << std::setprecision(12);
  for (const auto& row : r.rows) {
    os << r.kind << ',' << row.quantity << ',' << row.k << ',' << row.index << ',' << row.estimate << ',';
    if (!std::isnan(row.theory)) os << row.theory;
    os << ',' << (row.pass < 0 ? "na" : row.pass ? "true" : "false") << '\n';
  }
}

}  // namespace gsr::experiments
