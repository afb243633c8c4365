#pragma once

#include <cstdint>
#include <random>

#include "wfd/types.hpp"

namespace wfd {

// One stream of draws. The engine is std::mt19937_64, whose output sequence
// is fixed by the standard; all range reductions are done here rather than by
// <random> distributions, whose algorithms differ between library vendors.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Unbiased integer in [0, bound). bound must be non-zero.
  std::uint64_t uniform_int(std::uint64_t bound);

  // Duration in [lo, hi); exactly lo when lo == hi. Throws on lo > hi.
  Duration uniform_duration(Duration lo, Duration hi);

  // Real in [0, 1) with 53 bits of precision.
  double uniform_real();

  double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }

  bool bit() { return (next() >> 63) != 0; }

 private:
  std::mt19937_64 engine_;
};

// Per-simulation randomness. Each node gets an independent sub-stream seeded
// from hash(seed, node), so node behavior does not depend on the order in
// which nodes are created or iterated.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  RandomStream stream_for(NodeId node) const;

  // Stream for draws not attributable to a node (scenario generation etc).
  RandomStream global_stream() const;

 private:
  std::uint64_t seed_;
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace wfd
