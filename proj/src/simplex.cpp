#include "cmpg/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cmpg/errors.hpp"

namespace cmpg::lp {

namespace {

class Tableau {
 public:
  Tableau(const Problem& problem, const Options& options) : opt_(options) {
    n_ = problem.n_vars;
    m_ = static_cast<int>(problem.rows.size());
    // Column layout: structural | slack or surplus per inequality | artificial.
    int slack_count = 0;
    int art_count = 0;
    std::vector<int> sign(m_, 1);
    std::vector<Sense> sense(m_);
    for (int i = 0; i < m_; ++i) {
      sense[i] = problem.rows[i].sense;
      if (problem.rows[i].rhs < 0.0) {
        sign[i] = -1;
        if (sense[i] == Sense::less_equal) sense[i] = Sense::greater_equal;
        else if (sense[i] == Sense::greater_equal) sense[i] = Sense::less_equal;
      }
      if (sense[i] != Sense::equal) ++slack_count;
      if (sense[i] != Sense::less_equal) ++art_count;
    }
    art_begin_ = n_ + slack_count;
    cols_ = art_begin_ + art_count;
    width_ = cols_ + 1;
    a_.assign(static_cast<std::size_t>(m_) * width_, 0.0);
    basis_.assign(m_, -1);
    active_.assign(m_, 1);
    int next_slack = n_;
    int next_art = art_begin_;
    for (int i = 0; i < m_; ++i) {
      double* row = &a_[static_cast<std::size_t>(i) * width_];
      for (const Term& t : problem.rows[i].terms) {
        if (t.col < 0 || t.col >= n_) throw DimensionError("LP term column out of range");
        row[t.col] += sign[i] * t.coef;
      }
      row[cols_] = sign[i] * problem.rows[i].rhs;
      if (sense[i] == Sense::less_equal) {
        row[next_slack] = 1.0;
        basis_[i] = next_slack++;
      } else {
        if (sense[i] == Sense::greater_equal) row[next_slack++] = -1.0;
        row[next_art] = 1.0;
        basis_[i] = next_art++;
      }
    }
    // Phase-2 reduced costs: basic columns start with zero cost.
    z2_.assign(width_, 0.0);
    for (int j = 0; j < n_; ++j) z2_[j] = problem.objective[j];
    // Phase 1 maximizes -sum(artificials); price out the basic artificials.
    z1_.assign(width_, 0.0);
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < art_begin_) continue;
      const double* row = &a_[static_cast<std::size_t>(i) * width_];
      for (int j = 0; j < art_begin_; ++j) z1_[j] += row[j];
      z1_[cols_] += row[cols_];
    }
    max_iter_ = opt_.max_iterations > 0 ? opt_.max_iterations : 50L * (m_ + cols_) + 1000;
  }

  Solution run() {
    Solution sol;
    if (art_begin_ < cols_) {
      const Status s1 = optimize(z1_, /*allow_artificial=*/true);
      if (s1 == Status::iteration_limit) return finish(sol, s1);
      double rhs_scale = 1.0;
      for (int i = 0; i < m_; ++i) rhs_scale = std::max(rhs_scale, std::abs(a_[idx(i, cols_)]));
      if (z1_[cols_] > opt_.feasibility_tol * rhs_scale) return finish(sol, Status::infeasible);
      drive_out_artificials();
    }
    const Status s2 = optimize(z2_, /*allow_artificial=*/false);
    return finish(sol, s2);
  }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * width_ + j; }

  Solution& finish(Solution& sol, Status status) {
    sol.status = status;
    sol.iterations = iterations_;
    if (status == Status::optimal) {
      sol.x.assign(n_, 0.0);
      for (int i = 0; i < m_; ++i) {
        if (active_[i] && basis_[i] >= 0 && basis_[i] < n_) sol.x[basis_[i]] = std::max(0.0, a_[idx(i, cols_)]);
      }
      sol.objective = -z2_[cols_];
    }
    return sol;
  }

  // Returns optimal/unbounded/iteration_limit for the given objective row.
  Status optimize(std::vector<double>& z, bool allow_artificial) {
    const int limit_col = allow_artificial ? cols_ : art_begin_;
    int degenerate_run = 0;
    while (true) {
      if (iterations_ >= max_iter_) return Status::iteration_limit;
      const bool bland = degenerate_run >= opt_.bland_after;
      int q = -1;
      double best = opt_.optimality_tol;
      for (int j = 0; j < limit_col; ++j) {
        if (z[j] > best) {
          q = j;
          if (bland) break;
          best = z[j];
        }
      }
      if (q < 0) return Status::optimal;
      int p = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        if (!active_[i]) continue;
        const double aiq = a_[idx(i, q)];
        if (aiq <= opt_.pivot_tol) continue;
        const double r = a_[idx(i, cols_)] / aiq;
        if (p < 0 || r < ratio - 1e-12) {
          p = i;
          ratio = r;
        } else if (r <= ratio + 1e-12 && basis_[i] < basis_[p]) {
          p = i;
          ratio = std::min(ratio, r);
        }
      }
      if (p < 0) return Status::unbounded;
      degenerate_run = ratio <= 1e-12 ? degenerate_run + 1 : 0;
      pivot(p, q);
    }
  }

  void pivot(int p, int q) {
    ++iterations_;
    double* prow = &a_[idx(p, 0)];
    const double inv = 1.0 / prow[q];
    nz_.clear();
    for (int j = 0; j < width_; ++j) {
      if (prow[j] == 0.0) continue;
      prow[j] *= inv;
      if (std::abs(prow[j]) > 1e-14) nz_.push_back(j);
      else prow[j] = 0.0;
    }
    prow[q] = 1.0;
    auto eliminate = [&](double* row) {
      const double f = row[q];
      if (f == 0.0) return;
      for (int j : nz_) row[j] -= f * prow[j];
      row[q] = 0.0;
    };
    for (int i = 0; i < m_; ++i) {
      if (i != p) eliminate(&a_[idx(i, 0)]);
    }
    eliminate(z1_.data());
    eliminate(z2_.data());
    basis_[p] = q;
  }

  void drive_out_artificials() {
    for (int i = 0; i < m_; ++i) {
      if (!active_[i] || basis_[i] < art_begin_) continue;
      int best = -1;
      double best_abs = 1e-9;
      for (int j = 0; j < art_begin_; ++j) {
        const double v = std::abs(a_[idx(i, j)]);
        if (v > best_abs) {
          best_abs = v;
          best = j;
        }
      }
      if (best >= 0) {
        pivot(i, best);
      } else {
        active_[i] = 0;  // redundant row
      }
    }
  }

  Options opt_;
  int n_ = 0;
  int m_ = 0;
  int art_begin_ = 0;
  int cols_ = 0;
  int width_ = 0;
  long max_iter_ = 0;
  long iterations_ = 0;
  std::vector<double> a_;
  std::vector<double> z1_;
  std::vector<double> z2_;
  std::vector<int> basis_;
  std::vector<char> active_;
  std::vector<int> nz_;
};

}  // namespace

Solution maximize(const Problem& problem, const Options& options) {
  if (static_cast<int>(problem.objective.size()) != problem.n_vars) {
    throw DimensionError("LP objective length != n_vars");
  }
  Tableau tableau(problem, options);
  return tableau.run();
}

double max_violation(const Problem& problem, const std::vector<double>& x) {
  double worst = 0.0;
  for (double v : x) worst = std::max(worst, -v);
  for (const Row& row : problem.rows) {
    double lhs = 0.0;
    for (const Term& t : row.terms) lhs += t.coef * x[t.col];
    const double d = lhs - row.rhs;
    switch (row.sense) {
      case Sense::less_equal: worst = std::max(worst, d); break;
      case Sense::greater_equal: worst = std::max(worst, -d); break;
      case Sense::equal: worst = std::max(worst, std::abs(d)); break;
    }
  }
  return worst;
}

const char* to_string(Status status) {
  switch (status) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

}  // namespace cmpg::lp
