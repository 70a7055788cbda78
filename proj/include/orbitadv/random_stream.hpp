#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace orbitadv {

// Seeded source of uniform and Gaussian variates with a stable, documented
// layout: uniforms take the top 53 bits of one mt19937_64 draw, Gaussians
// come from Box-Muller pairs (one pair per two raw draws, second half
// cached).  Every sampling routine in the library consumes randomness only
// through this class, so a (seed, call-sequence) pair pins all outputs
// bit-exactly across platforms.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Raw 64 random bits.
  std::uint64_t bits() { return engine_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; deterministic two-draws-per-pair layout.
  double gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u1));  // u1 < 1 so log1p(-u1) is finite
    double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// SplitMix64 finalizer; bijective on 64-bit integers.
std::uint64_t mix64(std::uint64_t x);

// Stream for trial `index` under `master_seed`.  The mapping
// mix64(mix64(index) ^ master_seed) is injective in `index` for a fixed
// master seed, so distinct trials never share a stream.
RandomStream derive_stream(std::uint64_t master_seed, std::uint64_t index);

}  // namespace orbitadv
