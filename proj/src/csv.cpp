#include "cmpg/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

namespace cmpg {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double first_cost(const CycleRecord& c) { return c.cost_values.empty() ? 0.0 : c.cost_values[0]; }

}  // namespace

void write_run_trace_csv(std::ostream& os, const RunTrace& trace, int n_agents) {
  os << "cycle,agent,gap,selected,V_c";
  for (int i = 0; i < n_agents; ++i) os << ",V_r_agent" << i;
  os << ",episodes_used\n";
  for (const CycleRecord& c : trace.cycles) {
    const std::string sel = c.selected < 0 ? std::string("TERMINATED") : std::to_string(c.selected);
    for (int i = 0; i < n_agents; ++i) {
      const double gap = i < static_cast<int>(c.gaps.size()) ? c.gaps[i] : 0.0;
      os << c.cycle << ',' << i << ',' << num(gap) << ',' << sel << ',' << num(first_cost(c));
      for (int k = 0; k < n_agents; ++k) {
        os << ',' << num(k < static_cast<int>(c.reward_values.size()) ? c.reward_values[k] : 0.0);
      }
      os << ',' << c.episodes << '\n';
    }
  }
}

void write_cost_curve_csv(std::ostream& os, const RunTrace& trace) {
  os << "cycle,V_c\n";
  for (const CycleRecord& c : trace.cycles) os << c.cycle << ',' << num(first_cost(c)) << '\n';
}

void write_gap_curve_csv(std::ostream& os, const RunTrace& trace, int n_agents) {
  os << "cycle";
  for (int i = 0; i < n_agents; ++i) os << ",gap_agent" << i;
  os << ",max_gap\n";
  for (const CycleRecord& c : trace.cycles) {
    os << c.cycle;
    double worst = 0.0;
    for (int i = 0; i < n_agents; ++i) {
      const double g = i < static_cast<int>(c.gaps.size()) ? c.gaps[i] : 0.0;
      worst = std::max(worst, g);
      os << ',' << num(g);
    }
    os << ',' << num(worst) << '\n';
  }
}

void write_dual_trace_csv(std::ostream& os, const std::vector<DualTracePoint>& trace) {
  os << "t,lambda,V_hat_r,V_hat_c\n";
  for (const DualTracePoint& p : trace) {
    os << p.t << ',' << num(p.lambda) << ',' << num(p.v_hat_r) << ',' << num(p.v_hat_c) << '\n';
  }
}

void write_lambda_curve_csv(std::ostream& os, const std::vector<std::pair<double, double>>& trace) {
  os << "lambda,d_lambda\n";
  for (const auto& [l, d] : trace) os << num(l) << ',' << num(d) << '\n';
}

}  // namespace cmpg
