#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "cmpg/cmdp.hpp"
#include "cmpg/policy.hpp"

namespace cmpg {

// Denominators below this are treated as unreachable (uniform branch).
inline constexpr double kZeroMass = 1e-14;

// rho_h(s, a), stored densely in the same (h, s, a) layout as stage tables.
class OccupancyMeasure {
 public:
  OccupancyMeasure() = default;
  OccupancyMeasure(int horizon, int states, int actions);

  int horizon() const { return horizon_; }
  int states() const { return states_; }
  int actions() const { return actions_; }
  std::size_t index(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * states_ + s) * actions_ + a;
  }
  double operator()(int h, int s, int a) const { return rho_[index(h, s, a)]; }
  double& at(int h, int s, int a) { return rho_[index(h, s, a)]; }
  const std::vector<double>& data() const { return rho_; }
  std::vector<double>& data() { return rho_; }

  // Sum over (s, a) at step h.
  double step_mass(int h) const;

 private:
  int horizon_ = 0;
  int states_ = 0;
  int actions_ = 0;
  std::vector<double> rho_;
};

// Forward recursion: rho_0 = mu * pi_0, rho_h(s,a) = sum rho_{h-1}(s',a') P_{h-1}(s|s',a') pi_h(a|s).
OccupancyMeasure occupancy_from_policy(const CMDP& model, const AgentPolicy& policy);

// pi_h(a|s) = rho_h(s,a) / sum_a' rho_h(s,a'), uniform where the mass is below kZeroMass.
AgentPolicy policy_from_occupancy(const OccupancyMeasure& occ);

// sum_h sum_{s,a} rho_h(s,a) l_h(s,a)
double value_from_occupancy(const OccupancyMeasure& occ, std::span<const double> stage);

OccupancyMeasure average_occupancies(std::span<const OccupancyMeasure> measures);
// Convex combination; weights must be nonnegative and sum to one.
OccupancyMeasure mix_occupancies(std::span<const OccupancyMeasure> measures, std::span<const double> weights);

// Largest absolute violation of the flow equations of `model`.
double flow_residual(const CMDP& model, const OccupancyMeasure& occ);

// CSV with header h,s,a,rho; zero entries skipped.
void write_occupancy_csv(std::ostream& out, const OccupancyMeasure& occ);

}  // namespace cmpg
