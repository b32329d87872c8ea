#pragma once

#include <vector>

namespace cmpg::lp {

enum class Sense { less_equal, equal, greater_equal };

struct Term {
  int col;
  double coef;
};

struct Row {
  std::vector<Term> terms;
  Sense sense = Sense::less_equal;
  double rhs = 0.0;
};

// maximize objective . x  subject to rows, x >= 0.
struct Problem {
  int n_vars = 0;
  std::vector<double> objective;
  std::vector<Row> rows;
};

enum class Status { optimal, infeasible, unbounded, iteration_limit };

struct Options {
  double pivot_tol = 1e-9;
  double optimality_tol = 1e-11;
  double feasibility_tol = 1e-9;
  long max_iterations = 0;  // 0: 50 * (rows + columns)
  int bland_after = 64;     // consecutive degenerate pivots before Bland's rule
};

struct Solution {
  Status status = Status::iteration_limit;
  double objective = 0.0;
  std::vector<double> x;
  long iterations = 0;
};

// Dense-tableau two-phase primal simplex. Dantzig pricing with a switch to
// Bland's rule on degenerate stalls; ratio-test ties go to the lowest basic
// column.
Solution maximize(const Problem& problem, const Options& options = {});

// Largest violation of the row constraints and of x >= 0.
double max_violation(const Problem& problem, const std::vector<double>& x);

const char* to_string(Status status);

}  // namespace cmpg::lp
