#include "okflow/series.hpp"

#include "okflow/errors.hpp"
#include "okflow/expr.hpp"
#include "okflow/rng.hpp"

#include <doctest.h>

namespace {

using namespace okflow;

TruncSeries from_coeffs(std::initializer_list<std::pair<std::int64_t, Rat>> terms, std::int64_t trunc,
                        bool exact = false) {
  TruncSeries s(1, trunc, exact);
  for (const auto& [e, c] : terms) s.set_coeff({e}, c);
  return s;
}

// The y/z expansion of the elliptic fixture, frozen through degree 9.
TruncSeries elliptic_branch(std::int64_t trunc = 9) {
  return from_coeffs({{0, Rat(1)}, {3, Rat(1, 2)}, {6, Rat(-1, 8)}, {9, Rat(1, 16)}}, trunc);
}

TEST_CASE("series addition and multiplication on the named examples") {
  TruncSeries one_plus = from_coeffs({{0, Rat(1)}, {1, Rat(1)}}, 4);
  TruncSeries one_minus = from_coeffs({{0, Rat(1)}, {1, Rat(-1)}}, 4);
  CHECK(series_add(one_plus, one_minus) == TruncSeries::constant(1, Rat(2), 4, false));

  TruncSeries y6 = from_coeffs({{0, Rat(1)}, {3, Rat(1, 2)}, {6, Rat(-1, 8)}}, 6);
  TruncSeries sq = series_mul(y6, y6);
  // Coefficient of u^6 cancels: 2(-1/8) + 1/4 = 0.
  CHECK(sq == from_coeffs({{0, Rat(1)}, {3, Rat(1)}}, 6));

  TruncSeries u1 = TruncSeries::monomial(1, {1}, Rat(1), 1, false);
  TruncSeries prod = series_mul(u1, u1);
  CHECK(prod.is_zero());
  CHECK(prod.trunc() == 1);

  TruncSeries other_arity(2, 4, false);
  CHECK_THROWS_AS(series_mul(u1, other_arity), input_error);
}

TEST_CASE("series inversion") {
  TruncSeries one = TruncSeries::constant(1, Rat(1), 5, true);
  CHECK(series_invert(one) == one);

  TruncSeries geo = series_invert(from_coeffs({{0, Rat(1)}, {1, Rat(1)}}, 3));
  CHECK(geo == from_coeffs({{0, Rat(1)}, {1, Rat(-1)}, {2, Rat(1)}, {3, Rat(-1)}}, 3));

  TruncSeries inv = series_invert(elliptic_branch());
  CHECK(inv == from_coeffs({{0, Rat(1)}, {3, Rat(-1, 2)}, {6, Rat(3, 8)}, {9, Rat(-5, 16)}}, 9));
  // Definitional check: a * invert(a) = 1 up to the truncation order.
  CHECK(series_mul(elliptic_branch(), inv) == TruncSeries::constant(1, Rat(1), 9, false));

  CHECK_THROWS_WITH_AS(series_invert(TruncSeries::monomial(1, {1}, Rat(1), 3, false)), "series_invert: not a unit",
                       input_error);
}

TEST_CASE("implicit_solve reproduces the elliptic branch") {
  TruncSeries g = parse_polynomial("y^2 - u^3 - 1", {"u", "y"});
  TruncSeries y = implicit_solve(g, Rat(1), 9);
  CHECK(y == elliptic_branch());

  TruncSeries graph = implicit_solve(parse_polynomial("y - u", {"u", "y"}), Rat(0), 5);
  CHECK(graph == TruncSeries::monomial(1, {1}, Rat(1), 5, false));

  // The other branch through y0 = -1; verified by substituting back into G.
  TruncSeries neg = implicit_solve(g, Rat(-1), 3);
  CHECK(neg == from_coeffs({{0, Rat(-1)}, {3, Rat(-1, 2)}}, 3));
  std::vector<TruncSeries> args{TruncSeries::monomial(1, {1}, Rat(1), 3, false), neg};
  CHECK(series_compose(g, args).is_zero());

  CHECK_THROWS_AS(implicit_solve(g, Rat(2), 5), input_error);           // point not on variety
  TruncSeries tangent = parse_polynomial("y^2 - u", {"u", "y"});
  CHECK_THROWS_AS(implicit_solve(tangent, Rat(0), 5), input_error);     // dG/dy vanishes
}

TEST_CASE("substitute_weighted on the named examples") {
  // f = u, gamma = 1, beta = 1 -> u~ with no t factor.
  TruncSeries f1 = TruncSeries::monomial(1, {1}, Rat(1), 9, false);
  TruncSeries s1 = substitute_weighted(f1, {1}, {1});
  CHECK(s1.arity() == 2);
  CHECK(s1.coeff({1, 0}) == 1);
  CHECK(s1.terms().size() == 1);

  // The elliptic branch with beta = 0 picks up t^{|alpha|}.
  TruncSeries s2 = substitute_weighted(elliptic_branch(), {1}, {0});
  CHECK(s2.coeff({0, 0}) == 1);
  CHECK(s2.coeff({3, 3}) == Rat(1, 2));
  CHECK(s2.coeff({6, 6}) == Rat(-1, 8));
  CHECK(s2.coeff({9, 9}) == Rat(1, 16));
  CHECK(s2.terms().size() == 4);

  // f = u^3/2 - u^6/8, beta = 3: exponents shift by gamma.beta = 3.
  TruncSeries f3 = from_coeffs({{3, Rat(1, 2)}, {6, Rat(-1, 8)}}, 9);
  TruncSeries s3 = substitute_weighted(f3, {1}, {3});
  CHECK(s3.coeff({3, 0}) == Rat(1, 2));
  CHECK(s3.coeff({6, 3}) == Rat(-1, 8));
  CHECK(s3.terms().size() == 2);

  CHECK_THROWS_WITH_AS(substitute_weighted(f3, {1}, {6}), "substitute_weighted: beta is not gamma-minimal",
                       input_error);
  CHECK_THROWS_AS(substitute_weighted(f3, {0}, {3}), input_error);
}

TEST_CASE("substitute_weighted keeps the initial term under steep weights") {
  // A large gamma.beta must not shrink the exactness window below the source
  // order; the initial monomial in particular always survives.
  TruncSeries f(2, 9, false);
  f.set_coeff({0, 2}, Rat(1));
  f.set_coeff({1, 3}, Rat(4));
  TruncSeries sub = substitute_weighted(f, {1, 9}, {0, 2});
  CHECK(sub.trunc() >= 9);
  CHECK(sub.coeff({0, 2, 0}) == 1);
}

TEST_CASE("substitute_weighted at t = 1 recovers the series") {
  Rng rng(5);
  for (int round = 0; round < 10; ++round) {
    TruncSeries f(1, 8, false);
    for (std::int64_t e = 0; e <= 8; ++e)
      if (rng.next_int(0, 1)) f.set_coeff({e}, rng.next_rat_nonzero(5));
    if (f.is_zero()) continue;
    LatticeVector beta = f.terms().begin()->first;
    TruncSeries sub = substitute_weighted(f, {1}, beta);
    // Collapse t = 1 exactly: collect (alpha, m) -> alpha.
    TruncSeries collapsed(1, f.trunc(), false);
    for (const auto& [e, c] : sub.terms()) {
      LatticeVector alpha{e[0]};
      collapsed.set_coeff(alpha, collapsed.coeff(alpha) + c);
    }
    CHECK(collapsed == f);
  }
}

TEST_CASE("constant-t term of the weighted substitution is the initial monomial") {
  // With gamma separating, the t-free part is the single monomial c_beta u~^beta.
  TruncSeries f = from_coeffs({{2, Rat(7, 3)}, {5, Rat(1)}, {7, Rat(-2)}}, 10);
  TruncSeries sub = substitute_weighted(f, {1}, {2});
  std::size_t t_free = 0;
  for (const auto& [e, c] : sub.terms())
    if (e[1] == 0) {
      ++t_free;
      CHECK(e[0] == 2);
      CHECK(c == Rat(7, 3));
    }
  CHECK(t_free == 1);
}

TEST_CASE("ring axioms up to truncation on random series") {
  Rng rng(31);
  auto random_series = [&](std::size_t arity, std::int64_t trunc) {
    TruncSeries s(arity, trunc, false);
    for (int k = 0; k < 6; ++k) {
      LatticeVector e(arity);
      std::int64_t budget = trunc;
      for (auto& x : e) {
        x = rng.next_int(0, budget);
        budget -= x;
      }
      s.set_coeff(e, rng.next_rat_nonzero(4));
    }
    return s;
  };
  for (int round = 0; round < 10; ++round) {
    std::size_t arity = static_cast<std::size_t>(rng.next_int(1, 2));
    TruncSeries a = random_series(arity, 6), b = random_series(arity, 6), c = random_series(arity, 6);
    CHECK(series_mul(a, b) == series_mul(b, a));
    CHECK(series_mul(series_mul(a, b), c) == series_mul(a, series_mul(b, c)));
    CHECK(series_mul(series_add(a, b), c) == series_add(series_mul(a, c), series_mul(b, c)));
  }
}

TEST_CASE("derivative and evaluation") {
  TruncSeries f = parse_polynomial("3*x^2*y + y^2 - 2", {"x", "y"});
  TruncSeries fx = f.derivative(0);
  CHECK(fx.coeff({1, 1}) == 6);
  CHECK(f.eval(QVec{Rat(2), Rat(3)}) == Rat(3 * 4 * 3 + 9 - 2));
  std::vector<std::complex<double>> z{{1.0, 0.0}, {0.0, 1.0}};
  std::complex<double> v = f.eval(z);
  CHECK(std::abs(v - std::complex<double>(-3.0, 3.0)) < 1e-12);
}

TEST_CASE("series JSON round trip") {
  TruncSeries f = elliptic_branch();
  TruncSeries g = TruncSeries::from_json(f.to_json());
  CHECK(f == g);
  CHECK(g.trunc() == f.trunc());
}

TEST_CASE("polynomial parser") {
  TruncSeries p = parse_polynomial("y^2 - x^3 - 1", {"x", "y"});
  CHECK(p.coeff({0, 2}) == 1);
  CHECK(p.coeff({3, 0}) == -1);
  CHECK(p.coeff({0, 0}) == -1);
  CHECK(p.exact());

  CHECK(parse_polynomial("2x", {"x"}).coeff({1}) == 2);
  CHECK(parse_polynomial("(1 - x)*(1 + x)", {"x"}).coeff({2}) == -1);
  CHECK(parse_polynomial("x^3/2", {"x"}).coeff({3}) == Rat(1, 2));
  CHECK(parse_polynomial("-x + 4", {"x"}).coeff({1}) == -1);

  CHECK_THROWS_AS(parse_polynomial("x + qq", {"x"}), input_error);
  CHECK_THROWS_AS(parse_polynomial("x +", {"x"}), input_error);
  CHECK_THROWS_AS(parse_polynomial("x / y", {"x", "y"}), input_error);
}

} // namespace
