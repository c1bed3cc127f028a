#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "gsr/sampling.hpp"

using gsr::GraphSignal;
using gsr::SamplingMask;
using gsr::Vector;

namespace {

GraphSignal random_signal(std::size_t n, std::uint64_t seed) {
  gsr::Rng rng(seed);
  GraphSignal f = GraphSignal::zeros(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = rng.uniform() - 0.3;
  return f;
}

struct ScopedThreads {
  explicit ScopedThreads(const char* v) { setenv("GSR_THREADS", v, 1); }
  ~ScopedThreads() { unsetenv("GSR_THREADS"); }
};

}  // namespace

TEST(Rng, DeriveSeedComposes) {
  EXPECT_EQ(gsr::derive_seed(5, {1, 2}), gsr::derive_seed(gsr::derive_seed(5, {1}), {2}));
  EXPECT_NE(gsr::derive_seed(5, {1, 2}), gsr::derive_seed(5, {2, 1}));
  EXPECT_EQ(gsr::derive_seed(5, {}), 5u);
}

TEST(Rng, UniformRangesAndBelow) {
  gsr::Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_GT(rng.uniform_open(), 0.0);
    EXPECT_LT(rng.below(7), 7u);
  }
  gsr::Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Parallel, VisitsEveryIndexOnceAndPropagatesErrors) {
  std::vector<int> hits(1000, 0);
  gsr::parallel_for(hits.size(), [&](std::size_t i) { ++hits[i]; }, 4);
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(gsr::parallel_for(
                   100, [](std::size_t i) { if (i == 57) throw std::runtime_error("boom"); }, 4),
               std::runtime_error);
}

TEST(Parallel, WorkerCountHonoursEnvironment) {
  ScopedThreads env("3");
  EXPECT_EQ(gsr::worker_count(), 3u);
}

TEST(BernoulliMask, FullProbabilityKeepsEverything) {
  auto m = gsr::bernoulli_mask(100, 1.0, 3);
  EXPECT_EQ(m.count(), 100u);
}

TEST(BernoulliMask, DeterministicPerSeed) {
  EXPECT_EQ(gsr::bernoulli_mask(500, 0.3, 9).kept, gsr::bernoulli_mask(500, 0.3, 9).kept);
  EXPECT_NE(gsr::bernoulli_mask(500, 0.3, 9).kept, gsr::bernoulli_mask(500, 0.3, 10).kept);
}

TEST(BernoulliMask, KeptFractionNearP) {
  auto m = gsr::bernoulli_mask(100000, 0.5, 1234);
  EXPECT_NEAR(static_cast<double>(m.count()) / 100000.0, 0.5, 0.01);
}

TEST(BernoulliMask, RejectsBadProbability) {
  EXPECT_THROW(gsr::bernoulli_mask(10, 0.0, 1), gsr::InputError);
  EXPECT_THROW(gsr::bernoulli_mask(10, -0.1, 1), gsr::InputError);
  EXPECT_THROW(gsr::bernoulli_mask(10, 1.5, 1), gsr::InputError);
  EXPECT_THROW(gsr::bernoulli_mask(10, std::nan(""), 1), gsr::InputError);
}

TEST(Subsample, Examples) {
  GraphSignal f(Vector::LinSpaced(3, 1.0, 3.0));
  EXPECT_EQ(gsr::subsample(f, SamplingMask::all(3)).values, f.values);
  EXPECT_EQ(gsr::subsample(f, SamplingMask::none(3)).values, Vector::Zero(3));
  Vector expected(3);
  expected << 1, 0, 3;
  EXPECT_EQ(gsr::subsample(f, SamplingMask({true, false, true})).values, expected);
  EXPECT_THROW(gsr::subsample(f, SamplingMask::all(4)), gsr::InputError);
}

// Exact expectation over all 2^n masks, weighted by their Bernoulli probability.
TEST(SubsampleStats, ExactEnumerationMatchesIdentities) {
  const std::size_t n = 8;
  auto basis = gsr::gft_basis(gsr::random_geometric_graph(n, 77));
  const GraphSignal f = random_signal(n, 5);
  const Vector fhat = gsr::gft(basis, f);
  for (double p : {0.2, 0.5, 0.9}) {
    Vector mean = Vector::Zero(n);
    double trace = 0.0, total_weight = 0.0;
    for (unsigned bits = 0; bits < (1u << n); ++bits) {
      std::vector<bool> kept(n);
      double w = 1.0;
      for (std::size_t i = 0; i < n; ++i) {
        kept[i] = (bits >> i) & 1u;
        w *= kept[i] ? p : 1.0 - p;
      }
      const Vector hat = gsr::gft(basis, gsr::subsample(f, SamplingMask(kept)));
      mean += w * hat;
      trace += w * (hat - p * fhat).squaredNorm();
      total_weight += w;
    }
    EXPECT_NEAR(total_weight, 1.0, 1e-14);
    EXPECT_LT((mean - p * fhat).cwiseAbs().maxCoeff(), 1e-12) << p;
    EXPECT_NEAR(trace, (p - p * p) * f.values.squaredNorm(), 1e-12) << p;
  }
}

TEST(SubsampleStats, FullSamplingIsDeterministic) {
  auto basis = gsr::gft_basis(gsr::random_geometric_graph(16, 2));
  const GraphSignal f = random_signal(16, 3);
  auto s = gsr::empirical_subsample_stats(f, basis, 1.0, 50, 1);
  EXPECT_EQ(s.mean_spectrum, gsr::gft(basis, f));
  EXPECT_EQ(s.trace_variance, 0.0);
  EXPECT_EQ(s.component_variance, Vector::Zero(16));
}

TEST(SubsampleStats, ZeroSignal) {
  auto basis = gsr::gft_basis(gsr::random_geometric_graph(16, 2));
  auto s = gsr::empirical_subsample_stats(GraphSignal::zeros(16), basis, 0.4, 100, 1);
  EXPECT_EQ(s.mean_spectrum, Vector::Zero(16));
  EXPECT_EQ(s.trace_variance, 0.0);
}

TEST(SubsampleStats, MonteCarloMatchesMeanAndVarianceIdentities) {
  const std::size_t n = 64;
  const double p = 0.5;
  auto basis = gsr::gft_basis(gsr::random_geometric_graph(n, 64));
  const GraphSignal f = random_signal(n, 8);
  auto s = gsr::empirical_subsample_stats(f, basis, p, 100000, 21);
  const Vector expected = p * gsr::gft(basis, f);
  std::size_t within = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double se = std::sqrt(s.component_variance[i] / 100000.0);
    within += std::abs(s.mean_spectrum[i] - expected[i]) <= 4.0 * se;
  }
  EXPECT_GE(static_cast<double>(within), 0.99 * n);
  const double theory = (p - p * p) * f.values.squaredNorm();
  EXPECT_NEAR(s.trace_variance / theory, 1.0, 0.03);
}

TEST(SubsampleStats, IndependentOfThreadCount) {
  auto basis = gsr::gft_basis(gsr::random_geometric_graph(32, 4));
  const GraphSignal f = random_signal(32, 4);
  gsr::SubsampleStats one, four;
  {
    ScopedThreads env("1");
    one = gsr::empirical_subsample_stats(f, basis, 0.3, 3000, 6);
  }
  {
    ScopedThreads env("4");
    four = gsr::empirical_subsample_stats(f, basis, 0.3, 3000, 6);
  }
  EXPECT_EQ(one.mean_spectrum, four.mean_spectrum);
  EXPECT_EQ(one.component_variance, four.component_variance);
  EXPECT_EQ(one.trace_variance, four.trace_variance);
}

TEST(SubsampleStats, Errors) {
  auto basis = gsr::gft_basis(gsr::random_geometric_graph(8, 1));
  EXPECT_THROW(gsr::empirical_subsample_stats(GraphSignal::zeros(8), basis, 0.5, 0, 1), gsr::InputError);
  EXPECT_THROW(gsr::empirical_subsample_stats(GraphSignal::zeros(7), basis, 0.5, 10, 1), gsr::InputError);
  EXPECT_THROW(gsr::empirical_subsample_stats(GraphSignal::zeros(8), basis, 0.0, 10, 1), gsr::InputError);
}
