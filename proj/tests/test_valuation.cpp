#include "okflow/valuation.hpp"

#include "okflow/errors.hpp"
#include "okflow/expr.hpp"
#include "okflow/polytope.hpp"
#include "okflow/rng.hpp"
#include "okflow/variety.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

namespace {

using namespace okflow;

TruncSeries from_coeffs(std::initializer_list<std::pair<std::int64_t, Rat>> terms, std::int64_t trunc,
                        bool exact = false) {
  TruncSeries s(1, trunc, exact);
  for (const auto& [e, c] : terms) s.set_coeff({e}, c);
  return s;
}

TruncSeries elliptic_branch() {
  return from_coeffs({{0, Rat(1)}, {3, Rat(1, 2)}, {6, Rat(-1, 8)}, {9, Rat(1, 16)}}, 9);
}

TEST_CASE("lex valuation of the fixture sections") {
  CHECK(lex_valuation(TruncSeries::monomial(1, {1}, Rat(1), 9, false)) == LatticeVector{1});
  CHECK(lex_valuation(elliptic_branch()) == LatticeVector{0});
  CHECK(lex_valuation(from_coeffs({{3, Rat(1, 2)}, {6, Rat(-1, 8)}, {9, Rat(1, 16)}}, 9)) == LatticeVector{3});

  CHECK_THROWS_AS(lex_valuation(TruncSeries(1, 5, false)), truncation_error);
  CHECK_THROWS_AS(lex_valuation(TruncSeries(1, 5, true)), input_error);
}

TEST_CASE("lex order is coordinate-1 most significant") {
  TruncSeries f(2, 6, false);
  f.set_coeff({1, 0}, Rat(1));
  f.set_coeff({0, 5}, Rat(1));
  CHECK(lex_valuation(f) == LatticeVector{0, 5});
}

TEST_CASE("triangularize the standard elliptic basis") {
  // {x/z, y/z, z/z}: y/z and z/z share value 0; elimination exposes value 3.
  std::vector<TruncSeries> basis{TruncSeries::monomial(1, {1}, Rat(1), 9, false), elliptic_branch(),
                                 TruncSeries::constant(1, Rat(1), 9, false)};
  ValuedBasis vb = triangularize(basis, {"x/z", "y/z", "z/z"});
  CHECK(vb.value_set == std::vector<LatticeVector>{{0}, {1}, {3}});
  // The eliminated section is z/z - y/z = -(w/z).
  CHECK(vb.sections[2].beta == LatticeVector{3});
  CHECK(vb.sections[2].lead_coeff == Rat(-1, 2));
}

TEST_CASE("triangularize leaves distinct-value inputs unchanged") {
  std::vector<TruncSeries> basis{TruncSeries::constant(1, Rat(1), 5, false),
                                 TruncSeries::monomial(1, {1}, Rat(1), 5, false)};
  ValuedBasis vb = triangularize(basis);
  CHECK(vb.value_set == std::vector<LatticeVector>{{0}, {1}});
  CHECK(vb.sections[0].series == basis[0]);
  CHECK(vb.sections[1].series == basis[1]);
}

TEST_CASE("triangularize eliminates a simple collision") {
  TruncSeries a = from_coeffs({{0, Rat(1)}, {1, Rat(1)}}, 5);
  TruncSeries b = from_coeffs({{0, Rat(1)}, {1, Rat(-1)}}, 5);
  ValuedBasis vb = triangularize({a, b});
  CHECK(vb.value_set == std::vector<LatticeVector>{{0}, {1}});
  CHECK(vb.sections[1].beta == LatticeVector{1});
  CHECK(vb.sections[1].lead_coeff == Rat(-2));
}

TEST_CASE("triangularize reports dependence") {
  TruncSeries u = TruncSeries::monomial(1, {1}, Rat(1), 6, true);
  TruncSeries two_u = TruncSeries::monomial(1, {1}, Rat(2), 6, true);
  CHECK_THROWS_AS(triangularize({u, two_u}), input_error); // exact inputs: certified dependence

  TruncSeries u_trunc = TruncSeries::monomial(1, {1}, Rat(1), 6, false);
  TruncSeries two_u_trunc = TruncSeries::monomial(1, {1}, Rat(2), 6, false);
  CHECK_THROWS_AS(triangularize({u_trunc, two_u_trunc}), truncation_error);
}

TEST_CASE("the value set is canonical under input permutations") {
  std::vector<TruncSeries> basis{TruncSeries::monomial(1, {1}, Rat(1), 9, false), elliptic_branch(),
                                 TruncSeries::constant(1, Rat(1), 9, false)};
  std::vector<std::size_t> perm{0, 1, 2};
  std::set<std::vector<LatticeVector>> seen;
  do {
    std::vector<TruncSeries> shuffled;
    for (auto i : perm) shuffled.push_back(basis[i]);
    seen.insert(triangularize(shuffled).value_set);
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(seen.size() == 1);
}

ValuedBasis ex92_basis() {
  ExpandedSections ex = expand_sections(VarietySpec::load("fixtures/elliptic_ex92.json"));
  return triangularize(ex.series, ex.ids);
}

TEST_CASE("power value sets of the adapted elliptic basis") {
  ValuedBasis basis = ex92_basis();
  PowerValueSet a1 = power_value_set(basis, 1);
  CHECK(a1.values == std::vector<LatticeVector>{{0}, {1}, {3}});

  PowerValueSet a2 = power_value_set(basis, 2);
  CHECK(a2.values == std::vector<LatticeVector>{{0}, {1}, {2}, {3}, {4}, {6}});
  CHECK(a2.dependents_dropped == 0);
  CHECK(delta_k(a2.values, 2).vertices() == std::vector<QVec>{QVec{Rat(0)}, QVec{Rat(3)}});

  // |A_k| <= binom(r + k - 1, k), and k Delta_k vertices lie in A_k.
  CHECK(a2.values.size() <= 6);
  QPolytope d2poly = delta_k(a2.values, 2);
  for (const auto& v : d2poly.vertices()) {
    LatticeVector scaled{rat_num(v[0] * 2).convert_to<std::int64_t>()};
    CHECK(std::find(a2.values.begin(), a2.values.end(), scaled) != a2.values.end());
  }
}

TEST_CASE("triangularize chains eliminations") {
  TruncSeries one = TruncSeries::constant(1, Rat(1), 6, false);
  TruncSeries one_u = from_coeffs({{0, Rat(1)}, {1, Rat(1)}}, 6);
  TruncSeries one_u_u2 = from_coeffs({{0, Rat(1)}, {1, Rat(1)}, {2, Rat(1)}}, 6);
  ValuedBasis vb = triangularize({one, one_u, one_u_u2});
  CHECK(vb.value_set == std::vector<LatticeVector>{{0}, {1}, {2}});
}

TEST_CASE("the cubic relation appears as a dropped product at k = 3") {
  // Ten degree-3 products of a 3-section basis against dim E^3 = 9: the
  // defining equation of the curve shows up as exactly one product that
  // reduces to zero, and the surviving values fill {0..7, 9}.
  ValuedBasis basis = ex92_basis();
  PowerValueSet a3 = power_value_set(basis, 3);
  CHECK(a3.dependents_dropped == 1);
  CHECK(a3.values == std::vector<LatticeVector>{{0}, {1}, {2}, {3}, {4}, {5}, {6}, {7}, {9}});
  CHECK(delta_k(a3.values, 3).vertices() == std::vector<QVec>{QVec{Rat(0)}, QVec{Rat(3)}});
}

TEST_CASE("power value set of a single unit section") {
  ValuedBasis vb = triangularize({TruncSeries::constant(1, Rat(1), 6, false)});
  for (std::int64_t k = 1; k <= 3; ++k) CHECK(power_value_set(vb, k).values == std::vector<LatticeVector>{{0}});
}

TEST_CASE("power value set precondition on the truncation order") {
  ValuedBasis basis = ex92_basis(); // max |beta| = 3, trunc = 9
  CHECK_THROWS_AS(power_value_set(basis, 4), truncation_error);
  CHECK_THROWS_AS(power_value_set(basis, 0), input_error);
}

TEST_CASE("valuation axioms on random truncated series") {
  Rng rng(17);
  auto random_series = [&](std::int64_t trunc) {
    TruncSeries s(2, trunc, false);
    for (int k = 0; k < 5; ++k) {
      LatticeVector e{rng.next_int(0, 2), rng.next_int(0, 2)};
      s.set_coeff(e, rng.next_rat_nonzero(5));
    }
    return s;
  };
  for (int round = 0; round < 30; ++round) {
    TruncSeries f = random_series(8), g = random_series(8);
    if (f.is_zero() || g.is_zero()) continue;
    LatticeVector vf = lex_valuation(f), vg = lex_valuation(g);
    CHECK(lex_valuation(series_mul(f, g)) == lv_add(vf, vg));
    TruncSeries sum = series_add(f, g);
    if (!sum.is_zero()) {
      LatticeVector vs = lex_valuation(sum);
      LatticeVector lo = lex_less(vf, vg) ? vf : vg;
      CHECK((vs == lo || lex_less(lo, vs)));
    }
  }
}

TEST_CASE("choose_gamma on the named examples") {
  // n = 1: the lex-min is the numeric min, gamma = 1 always works.
  SupportWithBeta one{{{0}, {3}, {6}}, {0}};
  CHECK(choose_gamma({one}) == LatticeVector{1});

  SupportWithBeta two{{{0, 1}, {2, 0}}, {0, 1}};
  CHECK(choose_gamma({two}) == LatticeVector{1, 1});

  SupportWithBeta lone{{{0, 0}}, {0, 0}};
  CHECK(choose_gamma({lone}) == LatticeVector{1, 1});

  // beta must be the lex-min of its support.
  SupportWithBeta bad{{{0, 0}, {1, 0}}, {1, 0}};
  CHECK_THROWS_AS(choose_gamma({bad}), input_error);
}

TEST_CASE("choose_gamma needs a steep weight for shallow supports") {
  // beta = (0,2) against (1,0): need 2 g2 < g1, so (3,1) at max-norm 3.
  SupportWithBeta s{{{0, 2}, {1, 0}}, {0, 2}};
  LatticeVector gamma = choose_gamma({s});
  CHECK(gamma == LatticeVector{3, 1});
  // Post-hoc strict minimality.
  for (const auto& alpha : s.support)
    if (alpha != s.beta) CHECK(lv_dot(gamma, s.beta) < lv_dot(gamma, alpha));

  // 5 g2 < g1 forces g1 >= 6, beyond the bound.
  SupportWithBeta beyond{{{0, 5}, {1, 0}}, {0, 5}};
  CHECK_THROWS_AS(choose_gamma({beyond}, 4), input_error);
}

TEST_CASE("lattice condition of a basis") {
  ValuedBasis basis = ex92_basis();
  CHECK(check_lattice_condition(basis));

  ValuedBasis lonely = triangularize({TruncSeries::constant(1, Rat(1), 6, false)});
  CHECK_FALSE(check_lattice_condition(lonely));
}

} // namespace
