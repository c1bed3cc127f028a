#pragma once

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

#include "errors.hpp"
#include "graph.hpp"
#include "parallel.hpp"
#include "sampling.hpp"

namespace gsr {

/// How the first iterate is formed.
enum class Initialization {
  /// f_0 = 0, so the recursion yields f_1 = lambda * f_s.
  Zero,
  /// f_1 = f_s directly (the tabulated variant).
  Sampled,
};

struct ImatgiConfig {
  double alpha = 0.2;
  /// Initial threshold. Unset means max |U^T f_1|, the largest coefficient of
  /// the first iterate (lambda * f_s or f_s depending on init).
  std::optional<double> beta;
  double lambda = 1.0;
  double epsilon = 1e-6;
  std::size_t max_iters = 20;
  Initialization init = Initialization::Zero;

  void validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputError("ImatgiConfig: lambda must be > 0");
    if (!(epsilon >= 0.0)) throw InputError("ImatgiConfig: epsilon must be >= 0");
    if (max_iters < 1) throw InputError("ImatgiConfig: max_iters must be >= 1");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InputError("ImatgiConfig: alpha must be >= 0");
    if (beta && (!(*beta >= 0.0) || !std::isfinite(*beta))) throw InputError("ImatgiConfig: beta must be >= 0");
  }

  /// Non-fatal: the mean recursion only contracts for 0 < lambda < 2/p.
  std::optional<std::string> stability_warning(double p) const {
    if (p > 0 && lambda >= 2.0 / p)
      return "lambda=" + std::to_string(lambda) + " is outside the stable range (0, 2/p) for p=" + std::to_string(p);
    return std::nullopt;
  }
};

inline double threshold_at(double beta, double alpha, std::size_t k) {
  return beta * std::exp(-alpha * static_cast<double>(k));
}

/// t(k) = beta * exp(-alpha * k). The config's beta must be set.
inline double threshold_at(const ImatgiConfig& config, std::size_t k) {
  if (!config.beta) throw InputError("threshold_at: beta is unresolved");
  return threshold_at(*config.beta, config.alpha, k);
}

/// Zeroes entries with |v[i]| < t; entries exactly at t are kept.
inline Vector hard_threshold(const Vector& v, double t) {
  if (!(t >= 0.0)) throw InputError("hard_threshold: threshold must be >= 0");
  Vector out = v;
  for (Eigen::Index i = 0; i < out.size(); ++i)
    if (std::abs(out[i]) < t) out[i] = 0.0;
  return out;
}

namespace detail {

inline std::size_t threshold_in_place(Eigen::Ref<Vector> v, double t) {
  std::size_t support = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) < t)
      v[i] = 0.0;
    else
      ++support;
  }
  return support;
}

// out = (I - lambda S) g + lambda f_s, split by vertex so missing vertices
// carry g through untouched.
inline void relax(Eigen::Ref<Vector> out, const Eigen::Ref<const Vector>& g, const Eigen::Ref<const Vector>& fs,
                  const SamplingMask& mask, double lambda) {
  for (Eigen::Index i = 0; i < g.size(); ++i)
    out[i] = mask[static_cast<std::size_t>(i)] ? (1.0 - lambda) * g[i] + lambda * fs[i] : g[i];
}

inline double adaptive_beta(const GftBasis& basis, const Vector& fs) {
  if (fs.size() == 0) return 0.0;
  return (basis.vectors().transpose() * fs).cwiseAbs().maxCoeff();
}

inline void check_problem(const GraphSignal& fs, const SamplingMask& mask, const GftBasis& basis, const char* where) {
  require_same_size(basis.size(), fs.size(), where);
  require_same_size(basis.size(), mask.size(), where);
}

}  // namespace detail

/// One relaxation step: g = U T_{t(k)}(U^T f_k), then (I - lambda S) g + lambda f_s.
inline GraphSignal imatgi_step(const GraphSignal& f_k, const GraphSignal& f_s, const SamplingMask& mask,
                               const GftBasis& basis, const ImatgiConfig& config, std::size_t k) {
  detail::check_problem(f_s, mask, basis, "imatgi_step");
  detail::require_same_size(basis.size(), f_k.size(), "imatgi_step");
  Vector spectrum = gft(basis, f_k);
  detail::threshold_in_place(spectrum, threshold_at(config, k));
  const Vector g = basis.vectors() * spectrum;
  GraphSignal out = GraphSignal::zeros(f_k.size());
  detail::relax(out.values, g, f_s.values, mask, config.lambda);
  return out;
}

struct IterationRecord {
  std::size_t k = 0;
  /// Threshold applied to f_{k-1} to produce f_k (t(0) = beta for the first iterate).
  double threshold = 0.0;
  /// ||f_k - f_{k-1}||_2
  double delta_norm = 0.0;
  /// Spectral coefficients that survived thresholding.
  std::size_t support_size = 0;
  std::optional<double> mse;
};

enum class StopReason { Converged, MaxIterations };

struct ImatgiTrace {
  std::vector<IterationRecord> records;
  StopReason stop = StopReason::MaxIterations;
  double beta = 0.0;

  std::size_t iterations() const noexcept { return records.size(); }
};

struct ImatgiResult {
  GraphSignal signal;
  ImatgiTrace trace;
};

/// Trace CSV: "k,threshold,delta_norm,support_size[,mse]".
inline void write_trace_csv(std::ostream& os, const ImatgiTrace& trace) {
  const bool with_mse = !trace.records.empty() && trace.records.front().mse.has_value();
  os << "#schema=v1\n";
  os << "k,threshold,delta_norm,support_size" << (with_mse ? ",mse" : "") << '\n';
  os << std::setprecision(17);
  for (const auto& r : trace.records) {
    os << r.k << ',' << r.threshold << ',' << r.delta_norm << ',' << r.support_size;
    if (with_mse) os << ',' << r.mse.value_or(std::numeric_limits<double>::quiet_NaN());
    os << '\n';
  }
}

/// Runs the thresholded relaxation until ||f_k - f_{k-1}||_2 <= epsilon for
/// some k >= 2 or max_iters iterates have been produced. f_s is zeroed on
/// missing vertices first. When truth is supplied, each record carries the vertex-domain MSE.
inline ImatgiResult imatgi_reconstruct(const GraphSignal& f_s, const SamplingMask& mask, const GftBasis& basis,
                                       ImatgiConfig config, const GraphSignal* truth = nullptr) {
  config.validate();
  detail::check_problem(f_s, mask, basis, "imatgi_reconstruct");
  if (truth) detail::require_same_size(basis.size(), truth->size(), "imatgi_reconstruct");
  const std::size_t n = f_s.size();
  const GraphSignal observed = subsample(f_s, mask);
  Vector current = config.init == Initialization::Zero ? Vector(config.lambda * observed.values) : observed.values;
  if (!config.beta) config.beta = detail::adaptive_beta(basis, current);

  ImatgiTrace trace;
  trace.beta = *config.beta;
  auto mse_of = [&](const Vector& f) -> std::optional<double> {
    if (!truth) return std::nullopt;
    return (f - truth->values).squaredNorm() / static_cast<double>(n);
  };

  double delta = current.norm();
  trace.records.push_back({1, threshold_at(config, 0), delta, 0, mse_of(current)});

  Vector spectrum(n), g(n), next(n);
  std::size_t k = 1;
  // no stopping test on f_1
  while (k < config.max_iters && (k == 1 || delta > config.epsilon)) {
    const double t = threshold_at(config, k);
    spectrum.noalias() = basis.vectors().transpose() * current;
    const std::size_t support = detail::threshold_in_place(spectrum, t);
    g.noalias() = basis.vectors() * spectrum;
    detail::relax(next, g, observed.values, mask, config.lambda);
    delta = (next - current).norm();
    current.swap(next);
    ++k;
    trace.records.push_back({k, t, delta, support, mse_of(current)});
  }
  trace.stop = k > 1 && delta <= config.epsilon ? StopReason::Converged : StopReason::MaxIterations;
  return {GraphSignal(std::move(current)), std::move(trace)};
}

/// Column-wise imatgi_reconstruct over many signals sharing one basis. Column
/// c of the result equals imatgi_reconstruct(fs.col(c), masks[c], ...).signal
/// up to floating point reassociation; each column stops independently.
/// Work is split into fixed column blocks so the output does not depend on
/// the worker count.
inline Matrix imatgi_reconstruct_batch(const Matrix& fs, const std::vector<SamplingMask>& masks,
                                       const GftBasis& basis, ImatgiConfig config,
                                       std::vector<std::size_t>* iterations = nullptr) {
  config.validate();
  const std::size_t n = basis.size();
  const std::size_t m = static_cast<std::size_t>(fs.cols());
  detail::require_same_size(n, static_cast<std::size_t>(fs.rows()), "imatgi_reconstruct_batch");
  detail::require_same_size(m, masks.size(), "imatgi_reconstruct_batch");
  for (const auto& mask : masks) detail::require_same_size(n, mask.size(), "imatgi_reconstruct_batch");

  constexpr std::size_t kBlock = 64;
  Matrix out(n, m);
  std::vector<std::size_t> iters(m, 1);
  const std::size_t blocks = (m + kBlock - 1) / kBlock;
  const Matrix& u = basis.vectors();

  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t c0 = b * kBlock, width = std::min(kBlock, m - c0);
    Matrix observed = fs.middleCols(c0, width);
    std::vector<double> beta(width);
    std::vector<bool> active(width, true);
    for (std::size_t c = 0; c < width; ++c) {
      for (std::size_t i = 0; i < n; ++i)
        if (!masks[c0 + c][i]) observed(i, c) = 0.0;
    }
    Matrix current = config.init == Initialization::Zero ? Matrix(config.lambda * observed) : observed;
    Matrix spectrum = u.transpose() * current;
    for (std::size_t c = 0; c < width; ++c) {
      beta[c] = config.beta ? *config.beta : spectrum.col(c).cwiseAbs().maxCoeff();
    }
    Matrix g(n, width);
    Vector next(n);
    for (std::size_t k = 1; k < config.max_iters; ++k) {
      if (std::none_of(active.begin(), active.end(), [](bool a) { return a; })) break;
      spectrum.noalias() = u.transpose() * current;
      for (std::size_t c = 0; c < width; ++c)
        if (active[c]) detail::threshold_in_place(spectrum.col(c), threshold_at(beta[c], config.alpha, k));
      g.noalias() = u * spectrum;
      for (std::size_t c = 0; c < width; ++c) {
        if (!active[c]) continue;
        detail::relax(next, g.col(c), observed.col(c), masks[c0 + c], config.lambda);
        const double delta = (next - current.col(c)).norm();
        current.col(c) = next;
        iters[c0 + c] = k + 1;
        if (delta <= config.epsilon) active[c] = false;
      }
    }
    out.middleCols(c0, width) = current;
  });
  if (iterations) *iterations = std::move(iters);
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo diagnostics of the iteration's statistics

/// How masks are drawn across iterations of a probe.
enum class MaskModel {
  /// One mask per trial, reused by every iteration (the actual algorithm).
  Fixed,
  /// A fresh mask at every iteration, independent of the current iterate.
  Resampled,
};

struct ContractionProbe {
  /// mean_error[j] = fhat - E{fhat_{j+1}} (iterates k = 1..iters).
  std::vector<Vector> mean_error;
  /// Standard error of each mean_error component.
  std::vector<Vector> standard_error;
  /// ratios[j] = mean_error[j+1] / mean_error[j], componentwise.
  std::vector<Vector> ratios;
  double expected_ratio = 0.0;

  /// Least-squares slope of mean_error[k+1] against mean_error[k].
  double pooled_ratio(std::size_t k) const {
    return mean_error[k + 1].dot(mean_error[k]) / mean_error[k].squaredNorm();
  }
};

/// Mean-error dynamics with thresholding disabled (every coefficient passes).
/// Trial t draws its masks from derive_seed(seed, {t, k}).
inline ContractionProbe contraction_probe(const GraphSignal& f, const GftBasis& basis, double p, double lambda,
                                          std::size_t trials, std::size_t iters, std::uint64_t seed,
                                          MaskModel model = MaskModel::Resampled) {
  check_probability(p, "contraction_probe");
  if (trials < 2 || iters < 1) throw InputError("contraction_probe: need trials >= 2 and iters >= 1");
  detail::require_same_size(basis.size(), f.size(), "contraction_probe");
  const std::size_t n = f.size();
  ImatgiConfig config;
  config.beta = 0.0;
  config.lambda = lambda;
  config.validate();

  struct Acc {
    std::vector<Vector> sum, sum_sq;
  };
  auto make = [&] { return Acc{std::vector<Vector>(iters, Vector::Zero(n)), std::vector<Vector>(iters, Vector::Zero(n))}; };
  auto acc = ordered_reduce<Acc>(
      trials, 256, make,
      [&](Acc& a, std::size_t t) {
        auto mask_for = [&](std::size_t k) {
          return bernoulli_mask(n, p, derive_seed(seed, {t, model == MaskModel::Fixed ? 0 : k}));
        };
        SamplingMask mask = mask_for(1);
        GraphSignal current(lambda * subsample(f, mask).values);
        for (std::size_t k = 1;; ++k) {
          const Vector spec = gft(basis, current);
          a.sum[k - 1] += spec;
          a.sum_sq[k - 1] += spec.cwiseProduct(spec);
          if (k == iters) break;
          mask = mask_for(k + 1);
          current = imatgi_step(current, subsample(f, mask), mask, basis, config, k);
        }
      },
      [](Acc& total, const Acc& part) {
        for (std::size_t k = 0; k < total.sum.size(); ++k) {
          total.sum[k] += part.sum[k];
          total.sum_sq[k] += part.sum_sq[k];
        }
      });

  const double tn = static_cast<double>(trials);
  const Vector fhat = gft(basis, f);
  ContractionProbe out;
  out.expected_ratio = 1.0 - lambda * p;
  for (std::size_t k = 0; k < iters; ++k) {
    const Vector mean = acc.sum[k] / tn;
    const Vector var = ((acc.sum_sq[k] - tn * mean.cwiseProduct(mean)) / (tn - 1.0)).cwiseMax(0.0);
    out.mean_error.push_back(fhat - mean);
    out.standard_error.push_back((var / tn).cwiseSqrt());
  }
  for (std::size_t k = 0; k + 1 < iters; ++k) out.ratios.push_back(out.mean_error[k + 1].cwiseQuotient(out.mean_error[k]));
  return out;
}

/// Delta-method relative standard error of ratios[k][i], treating numerator
/// and denominator as independent (they share trials, so this overstates it).
/// Errors at rounding level relative to the first iterate count as noise.
inline double ratio_relative_error(const ContractionProbe& probe, std::size_t k, Eigen::Index i) {
  const double floor = 1e-10 * probe.mean_error.front().cwiseAbs().maxCoeff();
  const double a = std::hypot(probe.standard_error[k][i], floor) / probe.mean_error[k][i];
  const double b = std::hypot(probe.standard_error[k + 1][i], floor) / probe.mean_error[k + 1][i];
  return std::sqrt(a * a + b * b);
}

struct RatioCheck {
  std::size_t resolved = 0;
  std::size_t within = 0;
  double worst_relative_error = 0.0;
  bool pass() const noexcept { return resolved > 0 && within == resolved; }
};

/// A ratio is resolved when z of its standard errors fit inside the
/// tolerance band; the rest are too noisy to judge at this trial count.
inline bool ratio_resolved(const ContractionProbe& probe, std::size_t k, Eigen::Index i, double rel_tol, double z = 4.0) {
  const double rel = ratio_relative_error(probe, k, i);
  return std::isfinite(rel) && z * rel <= rel_tol;
}

inline RatioCheck check_contraction(const ContractionProbe& probe, double rel_tol, double z = 4.0) {
  RatioCheck out;
  for (std::size_t k = 0; k < probe.ratios.size(); ++k) {
    for (Eigen::Index i = 0; i < probe.ratios[k].size(); ++i) {
      if (!ratio_resolved(probe, k, i, rel_tol, z)) continue;
      ++out.resolved;
      const double rel = std::abs(probe.ratios[k][i] - probe.expected_ratio) / std::abs(probe.expected_ratio);
      out.worst_relative_error = std::max(out.worst_relative_error, rel);
      if (rel <= rel_tol) ++out.within;
    }
  }
  return out;
}

/// Threshold floor for variance-guarded runs: t(k) >= gamma * sigma_k, with
/// sigma_k the largest standard deviation of an off-support coefficient.
struct VarianceGuard {
  double gamma = 2.0;
};

struct VarianceProbe {
  /// Per iterate k = 1..iters.
  std::vector<double> sigma2;
  std::vector<double> mse;
  /// Standard error of mse[k] - mse[k-1] (paired over trials); entry 0 is 0.
  std::vector<double> mse_step_se;
  /// Largest threshold used to produce each iterate (entry 0 is 0).
  std::vector<double> threshold;

  /// True when no step raises the MSE by more than `margin` paired standard errors.
  bool mse_non_increasing(double margin = 2.0) const {
    for (std::size_t k = 1; k < mse.size(); ++k)
      if (mse[k] - mse[k - 1] > margin * mse_step_se[k]) return false;
    return true;
  }
};

/// Ensemble statistics of the spectral iterates, run for config.max_iters
/// iterates in lockstep (epsilon is ignored). sigma2_k = E||fhat_k - E fhat_k||^2,
/// mse_k = E||fhat_k - fhat||^2. Trial t draws its masks from
/// derive_seed(seed, {t}) (Fixed) or derive_seed(seed, {t, k}) (Resampled).
/// With a guard, each step's threshold is raised to gamma times the largest
/// ensemble standard deviation among coefficients outside the support of
/// fhat; this needs the ground truth and so exists only as a diagnostic.
inline VarianceProbe variance_probe(const GraphSignal& f, const GftBasis& basis, ImatgiConfig config, double p,
                                    std::size_t trials, std::uint64_t seed,
                                    std::optional<VarianceGuard> guard = std::nullopt,
                                    MaskModel model = MaskModel::Resampled) {
  config.validate();
  check_probability(p, "variance_probe");
  if (trials < 2) throw InputError("variance_probe: trials must be >= 2");
  detail::require_same_size(basis.size(), f.size(), "variance_probe");
  const std::size_t n = f.size();
  const Matrix& u = basis.vectors();
  const Vector fhat = gft(basis, f);

  std::vector<SamplingMask> masks(trials);
  Matrix observed(n, trials);
  auto draw = [&](std::size_t k) {
    for (std::size_t t = 0; t < trials; ++t) {
      masks[t] = bernoulli_mask(n, p, model == MaskModel::Fixed ? derive_seed(seed, {t}) : derive_seed(seed, {t, k}));
      observed.col(t) = subsample(f, masks[t]).values;
    }
  };
  draw(1);
  Matrix current = config.init == Initialization::Zero ? Matrix(config.lambda * observed) : observed;
  Matrix spectrum = u.transpose() * current;
  std::vector<double> beta(trials);
  for (std::size_t t = 0; t < trials; ++t) beta[t] = config.beta ? *config.beta : spectrum.col(t).cwiseAbs().maxCoeff();

  const double scale = fhat.cwiseAbs().maxCoeff();
  std::vector<bool> on_support(n);
  for (std::size_t i = 0; i < n; ++i) on_support[i] = std::abs(fhat[i]) > 1e-9 * scale;

  const double tn = static_cast<double>(trials);
  VarianceProbe out;
  Vector previous_err(trials);
  double floor = 0.0;

  auto record = [&](const Matrix& spec, double threshold) {
    const Vector mean = spec.rowwise().mean();
    const Matrix centered = spec.colwise() - mean;
    const Vector comp_var = centered.rowwise().squaredNorm() / (tn - 1.0);
    const Vector err = (spec.colwise() - fhat).colwise().squaredNorm().transpose();
    out.sigma2.push_back(comp_var.sum());
    out.mse.push_back(err.mean());
    out.threshold.push_back(threshold);
    if (out.mse.size() == 1) {
      out.mse_step_se.push_back(0.0);
    } else {
      const Vector d = err - previous_err;
      const double dm = d.mean();
      out.mse_step_se.push_back(std::sqrt((d.array() - dm).square().sum() / (tn - 1.0) / tn));
    }
    previous_err = err;
    if (guard) {
      double spread = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (!on_support[i]) spread = std::max(spread, comp_var[i]);
      floor = guard->gamma * std::sqrt(spread);
    }
  };

  spectrum.noalias() = u.transpose() * current;
  record(spectrum, 0.0);
  Matrix g(n, trials);
  Vector next(n);
  for (std::size_t k = 1; k < config.max_iters; ++k) {
    double used = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const double th = std::max(threshold_at(beta[t], config.alpha, k), floor);
      used = std::max(used, th);
      detail::threshold_in_place(spectrum.col(t), th);
    }
    g.noalias() = u * spectrum;
    if (model == MaskModel::Resampled) draw(k + 1);
    for (std::size_t t = 0; t < trials; ++t) {
      detail::relax(next, g.col(t), observed.col(t), masks[t], config.lambda);
      current.col(t) = next;
    }
    spectrum.noalias() = u.transpose() * current;
    record(spectrum, used);
  }
  return out;
}

}  // namespace gsr
