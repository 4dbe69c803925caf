#ifndef MLMDA_RNG_HPP_INCLUDED
#define MLMDA_RNG_HPP_INCLUDED

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace mlmda {

/**
 * Counter-based pseudo-random generator.
 *
 * The i-th raw output is a pure function of (key, i): the splitmix64
 * finalizer applied to key + i * golden-gamma. No shared state, so
 * per-item streams can be derived as derive(master_seed, item_index)
 * and consumed from any thread or worker schedule with identical
 * results on every platform.
 */
class Rng {
public:
  explicit Rng(std::uint64_t seed) : key_(finalize(seed ^ kGamma)) {}

  static Rng derive(std::uint64_t master_seed, std::uint64_t index) {
    return Rng(finalize(master_seed + kGamma * (index + 1)));
  }

  std::uint64_t next_u64() { return finalize(key_ + kGamma * ++counter_); }

  std::uint32_t next_u32() { return static_cast<std::uint32_t>(next_u64() >> 32); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    // Unbiased via rejection on the top of the range.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t v;
    do { v = next_u64(); } while (v >= limit && span != 0);
    return lo + static_cast<std::int64_t>(v % span);
  }

  bool bernoulli(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("bernoulli: p outside [0,1]");
    return uniform() < p;
  }

  /// Standard normal via Box-Muller; the paired draw is cached.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * M_PI * u2;
    cached_ = r * std::sin(t);
    has_cached_ = true;
    return r * std::cos(t);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Poisson draw; Knuth's method for small means, normal approximation
  /// for large ones (mean > 256).
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean > 256.0) {
      const double v = std::floor(normal(mean, std::sqrt(mean)) + 0.5);
      return v < 0.0 ? 0 : static_cast<std::uint64_t>(v);
    }
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = uniform();
    while (prod > limit) {
      ++k;
      prod *= uniform();
    }
    return k;
  }

private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

} // namespace mlmda

#endif
