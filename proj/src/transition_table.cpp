#include "cmpg/transition_table.hpp"

#include <cmath>
#include <string>

#include "cmpg/errors.hpp"

namespace cmpg {

TransitionTable::TransitionTable(int horizon, int states, int actions)
    : horizon_(horizon), states_(states), actions_(actions) {
  if (horizon < 1 || states < 1 || actions < 1) {
    throw DimensionError("transition table needs H, |S|, |A| >= 1");
  }
  offsets_.reserve(rows() + 1);
}

void TransitionTable::push_row(std::span<const Successor> successors) {
  if (rows_filled() >= rows()) throw DimensionError("transition table already complete");
  for (const Successor& e : successors) {
    if (e.state < 0 || e.state >= states_) {
      throw DimensionError("successor state " + std::to_string(e.state) + " out of range");
    }
    if (e.prob != 0.0) entries_.push_back(e);
  }
  offsets_.push_back(entries_.size());
}

void TransitionTable::push_dense_row(std::span<const double> probs) {
  if (static_cast<int>(probs.size()) != states_) {
    throw DimensionError("dense transition row has wrong length");
  }
  if (rows_filled() >= rows()) throw DimensionError("transition table already complete");
  for (int s = 0; s < states_; ++s) {
    if (probs[s] != 0.0) entries_.push_back({s, probs[s]});
  }
  offsets_.push_back(entries_.size());
}

TransitionTable TransitionTable::from_dense(int horizon, int states, int actions,
                                            std::span<const double> dense) {
  TransitionTable table(horizon, states, actions);
  if (dense.size() != table.rows() * static_cast<std::size_t>(states)) {
    throw DimensionError("dense transitions: expected " +
                         std::to_string(table.rows() * states) + " entries, got " +
                         std::to_string(dense.size()));
  }
  for (std::size_t r = 0; r < table.rows(); ++r) {
    table.push_dense_row(dense.subspan(r * states, states));
  }
  return table;
}

std::vector<double> TransitionTable::to_dense() const {
  std::vector<double> dense(rows() * static_cast<std::size_t>(states_), 0.0);
  for (std::size_t r = 0; r < rows_filled(); ++r) {
    for (const Successor& e : row(r)) dense[r * states_ + e.state] += e.prob;
  }
  return dense;
}

double TransitionTable::prob(int h, int s, int a, int next) const {
  for (const Successor& e : row(h, s, a)) {
    if (e.state == next) return e.prob;
  }
  return 0.0;
}

void TransitionTable::validate(double tol) const {
  if (!complete()) {
    throw ModelError("transition table has " + std::to_string(rows_filled()) + " of " +
                     std::to_string(rows()) + " rows");
  }
  std::vector<int> seen(states_, -1);
  for (std::size_t r = 0; r < rows(); ++r) {
    double sum = 0.0;
    for (const Successor& e : row(r)) {
      if (!(e.prob >= 0.0)) throw ModelError("negative transition probability in row " + std::to_string(r));
      if (seen[e.state] == static_cast<int>(r)) {
        throw ModelError("duplicate successor in transition row " + std::to_string(r));
      }
      seen[e.state] = static_cast<int>(r);
      sum += e.prob;
    }
    if (std::abs(sum - 1.0) > tol) {
      throw ModelError("transition row " + std::to_string(r) + " sums to " + std::to_string(sum));
    }
  }
}

}  // namespace cmpg
