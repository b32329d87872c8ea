#include "cmpg/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "cmpg/errors.hpp"

namespace cmpg {

OccupancyMeasure::OccupancyMeasure(int horizon, int states, int actions)
    : horizon_(horizon), states_(states), actions_(actions),
      rho_(static_cast<std::size_t>(horizon) * states * actions, 0.0) {
  if (horizon < 1 || states < 1 || actions < 1) throw DimensionError("occupancy needs H, |S|, |A| >= 1");
}

double OccupancyMeasure::step_mass(int h) const {
  const std::size_t begin = index(h, 0, 0);
  const std::size_t end = begin + static_cast<std::size_t>(states_) * actions_;
  double m = 0.0;
  for (std::size_t k = begin; k < end; ++k) m += rho_[k];
  return m;
}

OccupancyMeasure occupancy_from_policy(const CMDP& model, const AgentPolicy& policy) {
  check_policy_dims(model, policy);
  const int S = model.n_states;
  const int A = model.n_actions;
  OccupancyMeasure occ(model.horizon, S, A);
  std::vector<double> state_mass(model.initial_dist);
  std::vector<double> next(S);
  for (int h = 0; h < model.horizon; ++h) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < S; ++s) {
      if (state_mass[s] == 0.0) continue;
      const auto pi = policy.row(h, s);
      for (int a = 0; a < A; ++a) {
        const double r = state_mass[s] * pi[a];
        occ.at(h, s, a) = r;
        if (r == 0.0 || h + 1 == model.horizon) continue;
        for (const Successor& e : model.transitions.row(h, s, a)) next[e.state] += r * e.prob;
      }
    }
    state_mass.swap(next);
  }
  return occ;
}

AgentPolicy policy_from_occupancy(const OccupancyMeasure& occ) {
  const int A = occ.actions();
  AgentPolicy policy(occ.horizon(), occ.states(), A);
  for (int h = 0; h < occ.horizon(); ++h) {
    for (int s = 0; s < occ.states(); ++s) {
      double denom = 0.0;
      for (int a = 0; a < A; ++a) {
        if (occ(h, s, a) < 0.0) throw ModelError("occupancy has a negative entry");
        denom += occ(h, s, a);
      }
      auto row = policy.row(h, s);
      if (denom < kZeroMass) {
        std::fill(row.begin(), row.end(), 1.0 / A);
      } else {
        for (int a = 0; a < A; ++a) row[a] = occ(h, s, a) / denom;
      }
    }
  }
  return policy;
}

double value_from_occupancy(const OccupancyMeasure& occ, std::span<const double> stage) {
  if (stage.size() != occ.data().size()) throw DimensionError("stage table does not match occupancy shape");
  double v = 0.0;
  for (std::size_t k = 0; k < stage.size(); ++k) v += occ.data()[k] * stage[k];
  return v;
}

OccupancyMeasure mix_occupancies(std::span<const OccupancyMeasure> measures, std::span<const double> weights) {
  if (measures.empty()) throw std::invalid_argument("cannot average an empty list of occupancy measures");
  if (weights.size() != measures.size()) throw DimensionError("one weight per occupancy measure required");
  double total = 0.0;
  for (double w : weights) total += w;
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("mixture weights must sum to one");
  const OccupancyMeasure& first = measures.front();
  OccupancyMeasure out(first.horizon(), first.states(), first.actions());
  for (std::size_t t = 0; t < measures.size(); ++t) {
    const OccupancyMeasure& m = measures[t];
    if (m.horizon() != first.horizon() || m.states() != first.states() || m.actions() != first.actions()) {
      throw DimensionError("occupancy measures differ in shape");
    }
    if (weights[t] < 0.0) throw std::invalid_argument("negative mixture weight");
    for (std::size_t k = 0; k < m.data().size(); ++k) out.data()[k] += weights[t] * m.data()[k];
  }
  return out;
}

OccupancyMeasure average_occupancies(std::span<const OccupancyMeasure> measures) {
  if (measures.empty()) throw std::invalid_argument("cannot average an empty list of occupancy measures");
  std::vector<double> w(measures.size(), 1.0 / static_cast<double>(measures.size()));
  return mix_occupancies(measures, w);
}

double flow_residual(const CMDP& model, const OccupancyMeasure& occ) {
  if (occ.horizon() != model.horizon || occ.states() != model.n_states || occ.actions() != model.n_actions) {
    throw DimensionError("occupancy shape does not match model");
  }
  const int S = model.n_states;
  const int A = model.n_actions;
  double worst = 0.0;
  std::vector<double> inflow(model.initial_dist);
  std::vector<double> next(S);
  for (int h = 0; h < model.horizon; ++h) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int s = 0; s < S; ++s) {
      double out = 0.0;
      for (int a = 0; a < A; ++a) {
        const double r = occ(h, s, a);
        worst = std::max(worst, -r);
        out += r;
        if (h + 1 < model.horizon) {
          for (const Successor& e : model.transitions.row(h, s, a)) next[e.state] += r * e.prob;
        }
      }
      worst = std::max(worst, std::abs(out - inflow[s]));
    }
    inflow.swap(next);
  }
  return worst;
}

void write_occupancy_csv(std::ostream& out, const OccupancyMeasure& occ) {
  out << "h,s,a,rho\n";
  const auto precision = out.precision(17);
  for (int h = 0; h < occ.horizon(); ++h) {
    for (int s = 0; s < occ.states(); ++s) {
      for (int a = 0; a < occ.actions(); ++a) {
        if (occ(h, s, a) != 0.0) out << h << ',' << s << ',' << a << ',' << occ(h, s, a) << '\n';
      }
    }
  }
  out.precision(precision);
}

}  // namespace cmpg
