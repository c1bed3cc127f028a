#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gsr {

/// SplitMix64 finalizer. Used to turn (master seed, stream index) pairs into
/// well separated seeds for independent streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derive a child seed from a master seed and a path of indices.
/// derive_seed(s, {a, b}) == derive_seed(derive_seed(s, {a}), {b}).
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = master;
  for (auto idx : path) s = splitmix64(s ^ splitmix64(idx + 0x632be59bd9b4e019ULL));
  return s;
}

/// Random stream with a fully specified algorithm (std::mt19937_64 output is
/// fixed by the standard). Floating point conversion is done here rather than
/// through <random> distributions, whose algorithms are implementation-defined.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Uniform integer in [0, bound) by rejection, bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace gsr
