#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "cmpg/random.hpp"
#include "cmpg/simplex.hpp"

using namespace cmpg;
using namespace cmpg::lp;

namespace {

Row row(std::vector<Term> terms, Sense sense, double rhs) { return Row{std::move(terms), sense, rhs}; }

// Two-variable reference: best feasible intersection of two constraint
// lines (axes included).
std::optional<double> vertex_max(const std::vector<double>& obj, const std::vector<std::array<double, 3>>& le) {
  std::vector<std::array<double, 3>> lines = le;  // a x + b y <= c
  lines.push_back({-1.0, 0.0, 0.0});
  lines.push_back({0.0, -1.0, 0.0});
  std::optional<double> best;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const auto& p = lines[i];
      const auto& q = lines[j];
      const double det = p[0] * q[1] - p[1] * q[0];
      if (std::abs(det) < 1e-12) continue;
      const double x = (p[2] * q[1] - p[1] * q[2]) / det;
      const double y = (p[0] * q[2] - p[2] * q[0]) / det;
      bool ok = true;
      for (const auto& l : lines) ok = ok && l[0] * x + l[1] * y <= l[2] + 1e-9;
      if (!ok) continue;
      const double v = obj[0] * x + obj[1] * y;
      if (!best || v > *best) best = v;
    }
  }
  return best;
}

}  // namespace

TEST_SUITE("simplex") {

TEST_CASE("textbook maximum") {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6).
  Problem p{2, {3.0, 5.0}, {}};
  p.rows.push_back(row({{0, 1.0}}, Sense::less_equal, 4.0));
  p.rows.push_back(row({{1, 2.0}}, Sense::less_equal, 12.0));
  p.rows.push_back(row({{0, 3.0}, {1, 2.0}}, Sense::less_equal, 18.0));
  const Solution s = maximize(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective == doctest::Approx(36.0).epsilon(1e-12));
  CHECK(s.x[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.x[1] == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(max_violation(p, s.x) < 1e-12);
}

TEST_CASE("equality and greater-equal rows need phase one") {
  // max x + y, x + y = 1, x >= 0.25 (as -x <= -0.25), y >= 0.5
  Problem p{2, {1.0, 2.0}, {}};
  p.rows.push_back(row({{0, 1.0}, {1, 1.0}}, Sense::equal, 1.0));
  p.rows.push_back(row({{0, -1.0}}, Sense::less_equal, -0.25));
  p.rows.push_back(row({{1, 1.0}}, Sense::greater_equal, 0.5));
  const Solution s = maximize(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(s.x[0] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("infeasible and unbounded problems") {
  Problem inf{1, {1.0}, {}};
  inf.rows.push_back(row({{0, 1.0}}, Sense::less_equal, 1.0));
  inf.rows.push_back(row({{0, 1.0}}, Sense::greater_equal, 2.0));
  CHECK(maximize(inf).status == Status::infeasible);

  Problem unb{2, {1.0, 1.0}, {}};
  unb.rows.push_back(row({{0, 1.0}, {1, -1.0}}, Sense::less_equal, 1.0));
  CHECK(maximize(unb).status == Status::unbounded);
}

TEST_CASE("redundant equalities") {
  Problem p{2, {1.0, 0.0}, {}};
  p.rows.push_back(row({{0, 1.0}, {1, 1.0}}, Sense::equal, 1.0));
  p.rows.push_back(row({{0, 2.0}, {1, 2.0}}, Sense::equal, 2.0));
  const Solution s = maximize(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate vertex does not cycle") {
  // A classic cycling example under Dantzig pricing without anti-cycling.
  Problem p{4, {0.75, -150.0, 0.02, -6.0}, {}};
  p.rows.push_back(row({{0, 0.25}, {1, -60.0}, {2, -0.04}, {3, 9.0}}, Sense::less_equal, 0.0));
  p.rows.push_back(row({{0, 0.5}, {1, -90.0}, {2, -0.02}, {3, 3.0}}, Sense::less_equal, 0.0));
  p.rows.push_back(row({{2, 1.0}}, Sense::less_equal, 1.0));
  const Solution s = maximize(p);
  REQUIRE(s.status == Status::optimal);
  CHECK(s.objective == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("term column out of range") {
  Problem p{1, {1.0}, {}};
  p.rows.push_back(row({{3, 1.0}}, Sense::less_equal, 1.0));
  CHECK_THROWS(maximize(p));
}

TEST_CASE("random two-variable problems match vertex enumeration") {
  Rng rng(30);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> obj{uniform01(rng) * 2 - 0.5, uniform01(rng) * 2 - 0.5};
    std::vector<std::array<double, 3>> le;
    Problem p{2, obj, {}};
    const int m = 2 + trial % 4;
    for (int i = 0; i < m; ++i) {
      const std::array<double, 3> l{uniform01(rng) * 2 - 0.3, uniform01(rng) * 2 - 0.3, uniform01(rng) * 3};
      le.push_back(l);
      p.rows.push_back(row({{0, l[0]}, {1, l[1]}}, Sense::less_equal, l[2]));
    }
    // Box keeps every instance bounded.
    le.push_back({1.0, 0.0, 10.0});
    le.push_back({0.0, 1.0, 10.0});
    p.rows.push_back(row({{0, 1.0}}, Sense::less_equal, 10.0));
    p.rows.push_back(row({{1, 1.0}}, Sense::less_equal, 10.0));
    const Solution s = maximize(p);
    const auto ref = vertex_max(obj, le);
    REQUIRE(ref.has_value());
    REQUIRE(s.status == Status::optimal);
    CHECK(std::abs(s.objective - *ref) < 1e-9);
    CHECK(max_violation(p, s.x) < 1e-9);
  }
}

}  // TEST_SUITE
