#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace cmpg {

using Rng = std::mt19937_64;

// 53-bit uniform in [0,1). Independent of the standard library's
// distribution implementations so traces are portable across toolchains.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Inverse-CDF draw. Falls back to the last positive entry when round-off
// leaves u above the accumulated mass.
inline int sample_index(std::span<const double> probs, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  int last = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last = static_cast<int>(i);
    if (u < acc) return last;
  }
  return last < 0 ? 0 : last;
}

// Derives an independent stream for a sub-task (agent, cycle, ...).
inline Rng derive_rng(Rng& parent) {
  std::seed_seq seq{parent(), parent()};
  return Rng(seq);
}

// Multinomial(n, probs) via conditional binomials. Same law as n i.i.d.
// categorical draws.
inline std::vector<std::uint64_t> sample_multinomial(std::uint64_t n, std::span<const double> probs,
                                                     Rng& rng) {
  std::vector<std::uint64_t> counts(probs.size(), 0);
  double remaining_mass = 0.0;
  for (double p : probs) remaining_mass += p > 0.0 ? p : 0.0;
  std::uint64_t left = n;
  for (std::size_t i = 0; i < probs.size() && left > 0; ++i) {
    const double p = probs[i] > 0.0 ? probs[i] : 0.0;
    if (p == 0.0) continue;
    const double cond = remaining_mass > 0.0 ? p / remaining_mass : 1.0;
    std::uint64_t k;
    if (cond >= 1.0) {
      k = left;
    } else {
      std::binomial_distribution<std::uint64_t> bin(left, cond);
      k = bin(rng);
    }
    counts[i] = k;
    left -= k;
    remaining_mass -= p;
  }
  if (left > 0) {
    // Round-off left mass unassigned; give it to the last positive entry.
    for (std::size_t i = probs.size(); i-- > 0;) {
      if (probs[i] > 0.0) {
        counts[i] += left;
        break;
      }
    }
  }
  return counts;
}

}  // namespace cmpg
