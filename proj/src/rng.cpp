#include "multiscale/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace multiscale {

SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 g(seed);
  std::uint64_t s = 0;
  for (std::uint64_t i = 0; i <= stream; ++i) s = g.next();
  return SplitMix64(s);
}

std::uint64_t derive_run_seed(std::uint64_t seed, std::uint64_t run) {
  SplitMix64 g(seed);
  std::uint64_t s = 0;
  for (std::uint64_t i = 0; i <= run; ++i) s = g.next();
  return s;
}

std::uint64_t binomial(SplitMix64& rng, std::uint64_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("binomial: p outside [0,1]");
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;

  const double q = 1.0 - p;
  const double nd = static_cast<double>(n);
  // Mode of the pmf; pmf(mode) evaluated once through lgamma, every other
  // value reached by the two-term recurrence, which stays in a sane range.
  std::uint64_t m = static_cast<std::uint64_t>((nd + 1.0) * p);
  if (m > n) m = n;
  const double md = static_cast<double>(m);
  const double log_pm = std::lgamma(nd + 1.0) - std::lgamma(md + 1.0) -
                        std::lgamma(nd - md + 1.0) + md * std::log(p) +
                        (nd - md) * std::log(q);
  const double pm = std::exp(log_pm);

  double u = rng.next_double();
  double acc = pm;
  if (u < acc) return m;

  // Zig-zag outward from the mode, alternating up/down, until the CDF mass
  // accumulated covers u.
  double ph = pm, pl = pm;
  std::uint64_t hi = m, lo = m;
  while (hi < n || lo > 0) {
    if (hi < n) {
      ph *= static_cast<double>(n - hi) / static_cast<double>(hi + 1) * (p / q);
      ++hi;
      acc += ph;
      if (u < acc) return hi;
    }
    if (lo > 0) {
      pl *= static_cast<double>(lo) / static_cast<double>(n - lo + 1) * (q / p);
      --lo;
      acc += pl;
      if (u < acc) return lo;
    }
  }
  // u fell in the ~1e-15 rounding dust beyond the accumulated mass.
  return m;
}

std::vector<std::uint64_t> multinomial(SplitMix64& rng, std::uint64_t n,
                                       const std::vector<double>& probs) {
  if (probs.empty()) throw std::invalid_argument("multinomial: empty probability vector");
  std::vector<std::uint64_t> out(probs.size(), 0);
  double remaining = 1.0;
  std::uint64_t left = n;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    if (left == 0) break;
    double pi = remaining > 0.0 ? probs[i] / remaining : 1.0;
    if (pi > 1.0) pi = 1.0;
    std::uint64_t draw = binomial(rng, left, pi);
    out[i] = draw;
    left -= draw;
    remaining -= probs[i];
  }
  out.back() += left;
  return out;
}

}  // namespace multiscale
