#pragma once
// Deterministic RNG: SplitMix64 engine plus exact binomial/multinomial
// sampling for the aggregated simulators. Everything here is reproducible
// from a 64-bit seed, with no hidden global state.

#include <cstdint>
#include <vector>

namespace multiscale {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen because the whole generator
// is one 64-bit counter: trivially seedable, portable, and fast enough that
// sampling cost is dominated by the binomial walk below.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0,1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Independent sub-stream k of a seed: seeded with the (k+1)-th raw output of
// SplitMix64(seed). Stream 0 drives rule choices, stream 1 drives explicit
// placement, so aggregate and explicit runs see identical rule draws.
SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t stream);

// Base seed for run r of a multi-run experiment: the (r+1)-th raw output of
// SplitMix64(seed).
std::uint64_t derive_run_seed(std::uint64_t seed, std::uint64_t run);

// Exact binomial(n, p) sample. CDF inversion started at the distribution
// mode with multiplicative pmf recurrences outward, so one uniform is
// consumed and the expected cost is O(sqrt(n p (1-p))) — exact for the
// n ~ 10^6 group sizes the simulator produces, where naive inversion from
// k = 0 would underflow.
std::uint64_t binomial(SplitMix64& rng, std::uint64_t n, double p);

// Multinomial(n, probs) via iterated binomial draws in declaration order;
// the remaining-mass renormalization keeps every draw a genuine binomial.
std::vector<std::uint64_t> multinomial(SplitMix64& rng, std::uint64_t n,
                                       const std::vector<double>& probs);

}  // namespace multiscale
