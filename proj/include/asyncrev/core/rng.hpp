#pragma once

#include <cstdint>

namespace asyncrev {

// SplitMix64 stream (Steele, Lea, Flood 2014): state += 0x9E3779B97F4A7C15,
// then a fixed xor-shift-multiply finalizer. Every derived draw below is
// implemented here rather than through <random> distributions, whose outputs
// are implementation-defined, so identical seeds give identical streams on
// every platform and standard library.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, bound); bound > 0. Rejection sampling, unbiased.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal via Box-Muller (one of each pair is cached). Uses libm
  // log/sin/cos, so bit-equality across platforms holds only for the same
  // libm; the integer and uniform draws are exact everywhere.
  double normal();

  // Independent child stream; deterministic function of this stream's state.
  SeededRng split() { return SeededRng(next_u64()); }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace asyncrev
