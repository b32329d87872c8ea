#pragma once

#include <ostream>
#include <utility>
#include <vector>

#include "cmpg/ca_cmpg.hpp"
#include "cmpg/primal_dual.hpp"

namespace cmpg {

// Numbers are written with %.12g so equal runs give equal bytes.

// cycle,agent,gap,selected,V_c,V_r_agent0,...,episodes_used
// One row per (cycle, agent); selected is an agent index or TERMINATED.
// V_c is the first constraint's value (0 when the game has none).
void write_run_trace_csv(std::ostream& os, const RunTrace& trace, int n_agents);

// cycle,V_c  (cost of the policy in force at the start of the cycle)
void write_cost_curve_csv(std::ostream& os, const RunTrace& trace);

// cycle,gap_agent0,...,max_gap
void write_gap_curve_csv(std::ostream& os, const RunTrace& trace, int n_agents);

// t,lambda,V_hat_r,V_hat_c
void write_dual_trace_csv(std::ostream& os, const std::vector<DualTracePoint>& trace);

// lambda,d_lambda
void write_lambda_curve_csv(std::ostream& os, const std::vector<std::pair<double, double>>& trace);

}  // namespace cmpg
