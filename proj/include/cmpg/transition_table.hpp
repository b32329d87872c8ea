#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cmpg {

struct Successor {
  int state;
  double prob;
};

// Step-indexed transition kernel P_h(s'|s,a) stored row-compressed. A row is
// addressed by (h, s, a) in row-major order; only positive entries are kept.
// Rows must be appended in index order.
class TransitionTable {
 public:
  TransitionTable() = default;
  TransitionTable(int horizon, int states, int actions);

  int horizon() const { return horizon_; }
  int states() const { return states_; }
  int actions() const { return actions_; }
  std::size_t rows() const { return static_cast<std::size_t>(horizon_) * states_ * actions_; }
  std::size_t rows_filled() const { return offsets_.size() - 1; }
  bool complete() const { return rows_filled() == rows(); }

  std::size_t row_index(int h, int s, int a) const {
    return (static_cast<std::size_t>(h) * states_ + s) * actions_ + a;
  }
  std::span<const Successor> row(std::size_t r) const {
    return {entries_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
  }
  std::span<const Successor> row(int h, int s, int a) const { return row(row_index(h, s, a)); }

  // Appends the next row. Entries with prob == 0 are dropped; states must be
  // distinct within a row.
  void push_row(std::span<const Successor> successors);
  // Appends the next row from a dense distribution over states.
  void push_dense_row(std::span<const double> probs);

  static TransitionTable from_dense(int horizon, int states, int actions,
                                    std::span<const double> dense);
  std::vector<double> to_dense() const;
  // P_h(s'|s,a) with a linear scan of the row.
  double prob(int h, int s, int a, int next) const;

  // Throws ModelError when a row is missing, has a negative entry or does
  // not sum to one within tol.
  void validate(double tol = 1e-12) const;

  std::size_t nonzeros() const { return entries_.size(); }

 private:
  int horizon_ = 0;
  int states_ = 0;
  int actions_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<Successor> entries_;
};

}  // namespace cmpg
