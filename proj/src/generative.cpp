#include "cmpg/generative.hpp"

#include <algorithm>
#include <cmath>

#include "cmpg/errors.hpp"

namespace cmpg {

GenerativeModel::GenerativeModel(CMDP truth) : truth_(std::move(truth)) {
  truth_.validate();
  known_ = known_structure(truth_);
  counters_.assign(truth_.stage_size(), 0);
}

int GenerativeModel::sample(int h, int s, int a, Rng& rng) {
  const auto row = truth_.transitions.row(h, s, a);
  ++counters_[truth_.index(h, s, a)];
  ++total_;
  scratch_.clear();
  for (const Successor& e : row) scratch_.push_back(e.prob);
  return row[sample_index(scratch_, rng)].state;
}

std::vector<std::uint64_t> GenerativeModel::sample_counts(int h, int s, int a, std::uint64_t n, Rng& rng) {
  const auto row = truth_.transitions.row(h, s, a);
  counters_[truth_.index(h, s, a)] += n;
  total_ += n;
  std::vector<std::uint64_t> counts(truth_.n_states, 0);
  if (row.size() == 1) {
    counts[row[0].state] = n;
    return counts;
  }
  scratch_.clear();
  for (const Successor& e : row) scratch_.push_back(e.prob);
  const auto local = sample_multinomial(n, scratch_, rng);
  for (std::size_t k = 0; k < row.size(); ++k) counts[row[k].state] = local[k];
  return counts;
}

CMDP build_empirical_cmdp(GenerativeModel& gen, std::uint64_t n_per_pair, double alpha_prime, Rng& rng) {
  if (n_per_pair < 1) throw ConfigError("need at least one sample per (h, s, a)");
  CMDP model = gen.known();
  model.threshold = alpha_prime;
  model.transitions = TransitionTable(model.horizon, model.n_states, model.n_actions);
  std::vector<double> row(model.n_states);
  const double inv = 1.0 / static_cast<double>(n_per_pair);
  for (int h = 0; h < model.horizon; ++h) {
    for (int s = 0; s < model.n_states; ++s) {
      for (int a = 0; a < model.n_actions; ++a) {
        const auto counts = gen.sample_counts(h, s, a, n_per_pair, rng);
        for (int k = 0; k < model.n_states; ++k) row[k] = static_cast<double>(counts[k]) * inv;
        model.transitions.push_dense_row(row);
      }
    }
  }
  return model;
}

double max_transition_error(const CMDP& a, const CMDP& b) {
  const auto da = a.transitions.to_dense();
  const auto db = b.transitions.to_dense();
  if (da.size() != db.size()) throw DimensionError("models differ in shape");
  double worst = 0.0;
  for (std::size_t k = 0; k < da.size(); ++k) worst = std::max(worst, std::abs(da[k] - db[k]));
  return worst;
}

double value_error_bound(const CMDP& a, const CMDP& b) {
  if (a.stage_size() != b.stage_size() || a.n_states != b.n_states) throw DimensionError("models differ in shape");
  const auto da = a.transitions.to_dense();
  const auto db = b.transitions.to_dense();
  const int S = a.n_states;
  double bound = 0.0;
  for (int h = 0; h + 1 < a.horizon; ++h) {
    double worst = 0.0;
    for (int s = 0; s < S; ++s) {
      for (int x = 0; x < a.n_actions; ++x) {
        const std::size_t base = a.index(h, s, x) * S;
        double l1 = 0.0;
        for (int k = 0; k < S; ++k) l1 += std::abs(da[base + k] - db[base + k]);
        worst = std::max(worst, l1);
      }
    }
    bound += 0.5 * worst * (a.horizon - h - 1);
  }
  return bound;
}

}  // namespace cmpg
