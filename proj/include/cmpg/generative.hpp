#pragma once

#include <cstdint>
#include <vector>

#include "cmpg/cmdp.hpp"
#include "cmpg/random.hpp"

namespace cmpg {

// Sampling oracle s' ~ P_h(.|s,a) over a hidden CMDP, with per-(h,s,a) draw
// counters. Learners see only known_structure() (everything but P).
class GenerativeModel {
 public:
  explicit GenerativeModel(CMDP truth);

  const CMDP& known() const { return known_; }
  int sample(int h, int s, int a, Rng& rng);
  // Counts of n draws, distributed as n independent calls to sample().
  std::vector<std::uint64_t> sample_counts(int h, int s, int a, std::uint64_t n, Rng& rng);

  std::uint64_t draws(int h, int s, int a) const { return counters_[known_.index(h, s, a)]; }
  std::uint64_t total_draws() const { return total_; }

  // Test access to the hidden model.
  const CMDP& truth_for_testing() const { return truth_; }

 private:
  CMDP truth_;
  CMDP known_;
  std::vector<std::uint64_t> counters_;
  std::uint64_t total_ = 0;
  std::vector<double> scratch_;
};

// Empirical CMDP from N draws per (h, s, a); rewards, costs and mu copied
// from the known structure, threshold replaced by alpha_prime.
CMDP build_empirical_cmdp(GenerativeModel& gen, std::uint64_t n_per_pair, double alpha_prime, Rng& rng);

// max over (h,s,a,s') of |P - P_hat|.
double max_transition_error(const CMDP& a, const CMDP& b);
// Upper bound on sup_pi |V^l(pi) - V_hat^l(pi)| for stage values in [0,1]:
// sum_h max_{s,a} ||P_h - P_hat_h||_1 / 2 * (H - h - 1).
double value_error_bound(const CMDP& a, const CMDP& b);

}  // namespace cmpg
