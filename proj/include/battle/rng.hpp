#pragma once

#include <cstdint>
#include <random>

namespace battle {

/// Seeded generator with platform-independent derived distributions.
///
/// The engine is the Mersenne Twister (fully specified by the standard); the
/// real/integer mappings are done here rather than through <random>
/// distributions, whose algorithms are implementation-defined. Together that
/// keeps RunRecords byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, bound), bound > 0 (rejection sampling, unbiased).
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Independent per-purpose streams derived from one run seed, so that e.g. the
/// sequence of issued agent ids does not shift when casualty draws change.
struct RunStreams {
  Rng ids;
  Rng casualty;
  Rng soldiers;

  static RunStreams from_seed(std::uint64_t seed);
};

}  // namespace battle
