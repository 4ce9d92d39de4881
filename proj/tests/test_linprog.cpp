#include "okflow/linprog.hpp"

#include "okflow/rng.hpp"

#include <doctest.h>

#include <functional>
#include <optional>

namespace {

using namespace okflow;

TEST_CASE("simplex solves hand-checked programs") {
  // max x + y on x <= 2, y <= 3, x + y <= 4.
  QMat a{{Rat(1), Rat(0)}, {Rat(0), Rat(1)}, {Rat(1), Rat(1)}};
  QVec b{Rat(2), Rat(3), Rat(4)};
  QVec c{Rat(1), Rat(1)};
  LpResult r = lp_maximize(a, b, c);
  REQUIRE(r.status == LpResult::Status::Optimal);
  CHECK(r.objective == 4);

  // Infeasible: x <= -1 with x >= 0.
  LpResult bad = lp_maximize({{Rat(1)}}, {Rat(-1)}, {Rat(1)});
  CHECK(bad.status == LpResult::Status::Infeasible);

  // Unbounded: maximize x with only -x <= 0.
  LpResult unb = lp_maximize({{Rat(-1)}}, {Rat(0)}, {Rat(1)});
  CHECK(unb.status == LpResult::Status::Unbounded);

  // Negative right-hand side forces phase 1: x >= 1 via -x <= -1, x <= 5.
  LpResult ph = lp_maximize({{Rat(-1)}, {Rat(1)}}, {Rat(-1), Rat(5)}, {Rat(-1)});
  REQUIRE(ph.status == LpResult::Status::Optimal);
  CHECK(ph.objective == -1);
  CHECK(ph.x[0] == 1);
}

// Oracle: enumerate all candidate basic points (intersections of constraint
// and nonnegativity hyperplanes), keep the feasible ones, take the best
// objective. Exponential but exact, and completely independent of the
// simplex path.
std::optional<Rat> brute_force_max(const QMat& a, const QVec& b, const QVec& c) {
  const std::size_t n = c.size();
  QMat rows = a;
  QVec rhs = b;
  for (std::size_t i = 0; i < n; ++i) {
    QVec e(n, Rat(0));
    e[i] = 1;
    rows.push_back(e); // x_i = 0 candidate active constraint
    rhs.push_back(Rat(0));
  }
  std::optional<Rat> best;
  std::vector<std::size_t> idx(n);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t pos, std::size_t start) {
    if (pos == n) {
      QMat sys;
      QVec sb;
      for (std::size_t k = 0; k < n; ++k) {
        sys.push_back(rows[idx[k]]);
        sb.push_back(rhs[idx[k]]);
      }
      auto x = qmat_solve(sys, sb);
      if (!x) return;
      for (const auto& xi : *x)
        if (xi < 0) return;
      for (std::size_t r = 0; r < a.size(); ++r) {
        Rat lhs = 0;
        for (std::size_t j = 0; j < n; ++j) lhs += a[r][j] * (*x)[j];
        if (lhs > b[r]) return;
      }
      Rat obj = 0;
      for (std::size_t j = 0; j < n; ++j) obj += c[j] * (*x)[j];
      if (!best || obj > *best) best = obj;
      return;
    }
    for (std::size_t k = start; k < rows.size(); ++k) {
      idx[pos] = k;
      rec(pos + 1, k + 1);
    }
  };
  rec(0, 0);
  return best;
}

TEST_CASE("simplex agrees with the vertex-enumeration oracle on random bounded programs") {
  Rng rng(53);
  std::size_t solved = 0;
  while (solved < 60) {
    std::size_t n = static_cast<std::size_t>(rng.next_int(1, 3));
    std::size_t m = static_cast<std::size_t>(rng.next_int(1, 4));
    QMat a(m, QVec(n));
    QVec b(m), c(n);
    for (auto& row : a)
      for (auto& x : row) x = Rat(rng.next_int(-3, 3));
    for (auto& x : b) x = Rat(rng.next_int(-2, 6));
    for (auto& x : c) x = Rat(rng.next_int(-3, 3));
    // Cap every variable so the region is bounded and the oracle total.
    for (std::size_t i = 0; i < n; ++i) {
      QVec e(n, Rat(0));
      e[i] = 1;
      a.push_back(e);
      b.push_back(Rat(7));
    }
    LpResult r = lp_maximize(a, b, c);
    auto oracle = brute_force_max(a, b, c);
    if (!oracle) {
      CHECK(r.status == LpResult::Status::Infeasible);
    } else {
      REQUIRE(r.status == LpResult::Status::Optimal);
      CHECK(r.objective == *oracle);
    }
    ++solved;
  }
}

} // namespace
