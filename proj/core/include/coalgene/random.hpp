#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace coalgene {

/// Seeded random stream with explicitly implemented distribution transforms.
///
/// std::mt19937_64 output is fully specified by the standard, but the
/// standard distribution adaptors are not, so seeded runs would differ
/// between standard libraries. All transforms used by the simulators are
/// implemented here; a given seed produces the same draws everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for replicate `index` of an experiment with the
  /// given master seed. Streams for distinct indices do not overlap in any
  /// practical sense and results never depend on how replicates are
  /// scheduled across threads.
  static Rng for_replicate(std::uint64_t master_seed, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0,1) with 53 random bits; never returns 1.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  /// Exponential with the given rate (> 0).
  double exponential(double rate);

  /// Uniform integer on [0, n), n >= 1. Unbiased (bounded rejection).
  std::uint64_t uniform_below(std::uint64_t n);

  std::uint64_t poisson(double mean);

  /// Uniform ordered pair 0 <= first < second < k from the k*(k-1)/2
  /// possibilities. A single index is drawn and mapped through the fixed
  /// enumeration (0,1),(0,2),...,(0,k-1),(1,2),...,(k-2,k-1).
  std::pair<int, int> uniform_pair(int k);

 private:
  std::uint64_t poisson_inversion(double mean);
  std::uint64_t poisson_transformed_rejection(double mean);

  std::mt19937_64 engine_;
};

}  // namespace coalgene
