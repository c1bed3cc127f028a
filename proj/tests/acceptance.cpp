// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
//   acceptance            all criteria
//   acceptance 1 5 7      a subset
//
// GSR_DATA_DIR overrides the directory holding movielens_100k.tsv.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "gsr/gsr.hpp"

using gsr::GraphSignal;
using gsr::Matrix;
using gsr::Vector;
namespace ex = gsr::experiments;
namespace rs = gsr::recsys;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [fail]");
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GraphSignal uniform_signal(std::size_t n, std::uint64_t seed) {
  gsr::Rng rng(seed);
  GraphSignal f = GraphSignal::zeros(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = 2.0 * rng.uniform() - 1.0;
  return f;
}

Outcome subsampling_identities() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  ex::ProbeParams pp;
  pp.n = 64;
  pp.p = 0.5;
  pp.trials = 100000;
  const auto probe = ex::probe_subsampling(pp);
  const auto& frac = probe.rows[probe.rows.size() - 2];
  const auto& tr = probe.rows.back();
  o.require(frac.pass == 1, fmt("mean within 4 SE on %.1f%% of components", 100.0 * frac.estimate));
  o.require(tr.pass == 1, fmt("trace variance %.4g vs %.4g (%.2f%%)", tr.estimate, tr.theory,
                              100.0 * std::abs(tr.estimate / tr.theory - 1.0)));

  // exhaustive expectation over all 2^8 masks
  const std::size_t n = 8;
  auto basis = gsr::gft_basis(gsr::random_geometric_graph(n, 8));
  const GraphSignal f = uniform_signal(n, 8);
  const Vector fhat = gsr::gft(basis, f);
  double worst = 0.0;
  for (double p : {0.3, 0.5, 0.75}) {
    Vector mean = Vector::Zero(n);
    double trace = 0.0;
    for (unsigned bits = 0; bits < (1u << n); ++bits) {
      std::vector<bool> kept(n);
      double w = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        kept[i] = (bits >> i) & 1u;
        w *= kept[i] ? p : 1.0 - p;
      }
      const Vector hat = gsr::gft(basis, gsr::subsample(f, gsr::SamplingMask(kept)));
      mean += w * hat;
      trace += w * (hat - p * fhat).squaredNorm();
    }
    worst = std::max(worst, (mean - p * fhat).cwiseAbs().maxCoeff());
    worst = std::max(worst, std::abs(trace - (p - p * p) * f.values.squaredNorm()));
  }
  o.require(worst <= 1e-12, fmt("n=8 enumeration max deviation %.2e", worst));
  const double s = seconds_since(t0);
  o.require(s < 30.0, fmt("%.1f s", s));
  return o;
}

Outcome mean_contraction() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  const double p = 0.8;
  ex::ProbeParams pp;
  pp.n = 32;
  pp.p = p;
  pp.trials = 5000;
  pp.iters = 10;
  auto fx = ex::make_probe_fixture(pp);
  for (double lp : {0.3, 0.5, 0.8}) {
    const auto seed = gsr::derive_seed(pp.seed, {static_cast<std::uint64_t>(std::lround(lp * 10))});
    const auto probe = gsr::contraction_probe(fx.signal, fx.basis, p, lp / p, pp.trials, pp.iters, seed);
    const auto check = gsr::check_contraction(probe, 0.1);
    const double pooled = probe.pooled_ratio(0);
    o.require(check.pass(), fmt("lambda*p=%.1f: %zu/%zu resolved ratios within 10%% (worst %.1f%%)", lp, check.within,
                                check.resolved, 100.0 * check.worst_relative_error));
    o.require(std::abs(pooled / (1.0 - lp) - 1.0) <= 0.1, fmt("pooled first-step ratio %.4f vs %.2f", pooled, 1.0 - lp));
  }
  const auto diverging = gsr::contraction_probe(fx.signal, fx.basis, p, 2.5 / p, 2000, 8, gsr::derive_seed(pp.seed, {25}));
  bool grows = true;
  for (std::size_t k = 1; k < diverging.mean_error.size(); ++k)
    grows = grows && diverging.mean_error[k].norm() > diverging.mean_error[k - 1].norm();
  o.require(grows, fmt("lambda=2.5/p mean error norm %.3g -> %.3g", diverging.mean_error.front().norm(),
                       diverging.mean_error.back().norm()));
  const double s = seconds_since(t0);
  o.require(s < 60.0, fmt("%.1f s", s));
  return o;
}

Outcome guarded_monotonicity() {
  Outcome o;
  ex::ProbeParams pp;
  pp.n = 128;
  pp.sparsity = 0.1;
  pp.gamma = 2.0;
  pp.iters = 15;
  pp.trials = 2000;
  pp.masks = gsr::MaskModel::Resampled;
  for (double p : {0.5, 0.6, 0.7}) {
    pp.p = p;
    const auto r = ex::probe_variance(pp);
    double first = 0, last = 0;
    for (const auto& row : r.rows) {
      if (row.quantity != "mse") continue;
      if (row.k == 1) first = row.estimate;
      last = row.estimate;
    }
    o.require(r.pass, fmt("p=%.1f MSE %.3g -> %.3g", p, first, last));
  }
  return o;
}

double mean_ratio(const gsr::SnrSummary& s) {
  return s.infinite > 0 ? std::numeric_limits<double>::infinity() : s.mean_ratio;
}

Outcome knee(std::size_t n, double budget_s) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  ex::SynthParams sp;
  sp.n = n;
  sp.p_list = {0.45, 0.55, 0.65};
  sp.sparsity_list = {0.1, 0.6};
  sp.trials = 100;
  sp.imatgi.max_iters = 20;
  const auto r = ex::run_synth(sp);
  for (double p : sp.p_list) {
    const double dense = mean_ratio(r.cell(p, 0.6).summary), sparse = mean_ratio(r.cell(p, 0.1).summary);
    o.require(sparse >= 10.0 * dense, fmt("n=%zu p=%.2f: SNR %.3g at 10%% vs %.3g at 60%%", n, p, sparse, dense));
  }
  const double lo = mean_ratio(r.cell(0.45, 0.6).summary), hi = mean_ratio(r.cell(0.65, 0.6).summary);
  o.require(hi > lo, fmt("n=%zu 60%% sparsity: SNR %.3g at p=0.65 vs %.3g at p=0.45", n, hi, lo));
  const double s = seconds_since(t0);
  o.require(s < budget_s, fmt("%.1f s", s));
  return o;
}

Outcome sparsity_knee() {
  Outcome full = knee(1000, 30 * 60.0);
  const Outcome smoke = knee(200, 120.0);
  full.require(smoke.pass, smoke.detail);
  return full;
}

Outcome exact_recovery() {
  Outcome o;
  auto basis = gsr::gft_basis(gsr::random_geometric_graph(100, 5));
  const GraphSignal f = uniform_signal(100, 5);
  gsr::ImatgiConfig c;
  c.max_iters = 1;
  const auto full = gsr::imatgi_reconstruct(f, gsr::SamplingMask::all(100), basis, c);
  const double err = (full.signal.values - f.values).cwiseAbs().maxCoeff();
  o.require(err <= 1e-8 && full.trace.iterations() == 1, fmt("full sampling max error %.2e after 1 iteration", err));

  // 16 vertices, spectrum on {1, 3}, 4 vertices dropped
  auto b16 = gsr::gft_basis(gsr::random_geometric_graph(16, 1));
  Vector hat = Vector::Zero(16);
  hat[1] = 2.0;
  hat[3] = -1.0;
  const GraphSignal truth = gsr::igft(b16, hat);
  std::vector<bool> kept(16, true);
  gsr::Rng rng(4);
  for (int dropped = 0; dropped < 4;) {
    const auto i = rng.below(16);
    if (kept[i]) {
      kept[i] = false;
      ++dropped;
    }
  }
  const gsr::SamplingMask mask(kept);
  Matrix a(12, 2);
  Vector y(12);
  for (std::size_t i = 0, r = 0; i < 16; ++i) {
    if (!kept[i]) continue;
    a(r, 0) = b16.vectors()(i, 1);
    a(r, 1) = b16.vectors()(i, 3);
    y[r++] = truth[i];
  }
  const Vector coef = a.colPivHouseholderQr().solve(y);
  const Vector oracle = b16.vectors().col(1) * coef[0] + b16.vectors().col(3) * coef[1];
  const auto rec = gsr::imatgi_reconstruct(gsr::subsample(truth, mask), mask, b16, gsr::ImatgiConfig{});
  const double dev = (rec.signal.values - oracle).cwiseAbs().maxCoeff();
  o.require(dev <= 1e-4, fmt("n=16 deviation from support least squares %.2e", dev));
  return o;
}

Outcome rating_benchmark() {
  Outcome o;
  std::string dir = GSR_DATA_DIR;
  if (const char* env = std::getenv("GSR_DATA_DIR")) dir = env;
  const auto path = (std::filesystem::path(dir) / "movielens_100k.tsv").string();
  const rs::RatingScale scale{0.5, 5.0};
  rs::IngestResult data;
  try {
    data = rs::ingest(path, rs::RatingsFormat::MovielensTab, scale);
  } catch (const gsr::DataError& e) {
    o.require(false, e.what());
    return o;
  }
  bool ordered = true;
  double imatgi_sum = 0.0;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto table = rs::subsample_triples(data.table, seed);
    const auto split = rs::make_cv_split(table.size(), seed);
    const auto im = rs::evaluate(rs::make_imatgi_interpolator(), "imatgi", "movielens_100k", table, split);
    const auto il = rs::evaluate(rs::make_ilsr_interpolator({0, 1000, 1e-9}), "ilsr", "movielens_100k", table, split);
    const auto kn = rs::evaluate(rs::make_knn_interpolator({10}), "knn", "movielens_100k", table, split);
    const bool ok = im.mean <= il.mean && im.mean <= kn.mean;
    ordered = ordered && ok;
    imatgi_sum += im.mean;
    o.require(ok, fmt("seed %d: imatgi %.4f ilsr %.4f knn %.4f", static_cast<int>(seed), im.mean, il.mean, kn.mean));
  }
  const double mean = imatgi_sum / 3.0;
  const bool in_band = std::abs(mean - 0.2406) <= 0.02;
  // the band is reported; the ordering gates
  o.detail += fmt("; imatgi mean %.4f %s the 0.2406 +/- 0.02 band", mean, in_band ? "inside" : "outside");
  return o;
}

Outcome spectral_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  double round_trip = 0.0, parseval = 0.0, lo = 0.0, hi = 0.0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t n = 10 + 5 * seed;
    auto basis = gsr::gft_basis(gsr::random_geometric_graph(n, seed));
    const GraphSignal f = uniform_signal(n, seed + 100);
    const Vector hat = gsr::gft(basis, f);
    round_trip = std::max(round_trip, (gsr::igft(basis, hat).values - f.values).cwiseAbs().maxCoeff());
    parseval = std::max(parseval, std::abs(hat.norm() - f.values.norm()) / f.values.norm());
    lo = std::min(lo, basis.frequencies().minCoeff());
    hi = std::max(hi, basis.frequencies().maxCoeff());
  }
  o.require(round_trip <= 1e-8, fmt("round trip %.1e", round_trip));
  o.require(parseval <= 1e-10, fmt("Parseval %.1e", parseval));
  o.require(lo >= -1e-10 && hi <= 2.0 + 1e-10, fmt("eigenvalues in [%.2e, %.12f]", lo, hi));

  double closed = 0.0;
  for (std::size_t n : {4, 9, 25}) {
    std::vector<gsr::Edge> path, cycle;
    for (std::size_t i = 0; i + 1 < n; ++i) path.push_back({i, i + 1, 1.0});
    cycle = path;
    cycle.push_back({0, n - 1, 1.0});
    const Vector lp = gsr::gft_basis(gsr::Graph(n, path)).frequencies();
    Vector lc = gsr::gft_basis(gsr::Graph(n, cycle)).frequencies();
    std::vector<double> expected;
    for (std::size_t k = 0; k < n; ++k) {
      closed = std::max(closed, std::abs(lp[k] - (1.0 - std::cos(std::numbers::pi * k / (n - 1.0)))));
      expected.push_back(1.0 - std::cos(2.0 * std::numbers::pi * k / n));
    }
    std::sort(expected.begin(), expected.end());
    for (std::size_t k = 0; k < n; ++k) closed = std::max(closed, std::abs(lc[k] - expected[k]));
  }
  o.require(closed <= 1e-12, fmt("path/cycle closed forms %.1e", closed));
  const double s = seconds_since(t0);
  o.require(s < 10.0, fmt("%.2f s", s));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"subsampling mean and variance identities", subsampling_identities},
      {"mean error contraction by 1 - lambda*p", mean_contraction},
      {"guarded MSE monotonicity", guarded_monotonicity},
      {"sparsity knee ordered by sampling rate", sparsity_knee},
      {"exact recovery and least-squares oracle", exact_recovery},
      {"MovieLens ordering against ILSR and KNN", rating_benchmark},
      {"spectral suite", spectral_suite},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!wanted.empty() && !wanted.count(id)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    failures += !o.pass;
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
