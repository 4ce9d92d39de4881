#include <functional>
#include "okflow/lattice.hpp"

#include "okflow/errors.hpp"
#include "okflow/rng.hpp"

#include <doctest.h>

namespace {

using namespace okflow;

IntMat make(std::size_t rows, std::size_t cols, std::initializer_list<std::int64_t> vals) {
  IntMat m(rows, cols);
  auto it = vals.begin();
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = Int(*it++);
  return m;
}

// Independent oracle for Smith diagonal entries: d_1...d_k = gcd of all k x k
// minors (determinantal divisors), computed by direct enumeration.
std::vector<Int> determinantal_divisors(const IntMat& m) {
  const std::size_t n = std::min(m.rows(), m.cols());
  std::vector<Int> divisors;
  Int prev = 1;
  for (std::size_t k = 1; k <= n; ++k) {
    Int g = 0;
    std::vector<std::size_t> ri(k), ci(k);
    std::function<void(std::size_t, std::size_t)> rows_loop = [&](std::size_t pos, std::size_t start) {
      if (pos == k) {
        std::function<void(std::size_t, std::size_t)> cols_loop = [&](std::size_t cpos, std::size_t cstart) {
          if (cpos == k) {
            IntMat sub(k, k);
            for (std::size_t a = 0; a < k; ++a)
              for (std::size_t b = 0; b < k; ++b) sub.at(a, b) = m.at(ri[a], ci[b]);
            g = mp::gcd(g, int_abs(det(sub)));
            return;
          }
          for (std::size_t c = cstart; c < m.cols(); ++c) {
            ci[cpos] = c;
            cols_loop(cpos + 1, c + 1);
          }
        };
        cols_loop(0, 0);
        return;
      }
      for (std::size_t r = start; r < m.rows(); ++r) {
        ri[pos] = r;
        rows_loop(pos + 1, r + 1);
      }
    };
    rows_loop(0, 0);
    if (g == 0) break;
    divisors.push_back(g / prev);
    prev = g;
  }
  return divisors;
}

void check_snf(const IntMat& m) {
  SmithResult snf = smith_normal_form(m);
  CHECK(int_abs(det(snf.U)) == 1);
  CHECK(int_abs(det(snf.V)) == 1);
  CHECK(snf.U * m * snf.V == snf.D);
  for (std::size_t i = 0; i < snf.D.rows(); ++i)
    for (std::size_t j = 0; j < snf.D.cols(); ++j)
      if (i != j) CHECK(snf.D.at(i, j) == 0);
  std::size_t nmin = std::min(m.rows(), m.cols());
  for (std::size_t i = 0; i + 1 < nmin; ++i) {
    CHECK(snf.D.at(i, i) >= 0);
    if (snf.D.at(i, i) != 0) CHECK(snf.D.at(i + 1, i + 1) % snf.D.at(i, i) == 0);
  }
  std::vector<Int> oracle = determinantal_divisors(m);
  for (std::size_t i = 0; i < nmin; ++i) {
    Int expect = i < oracle.size() ? oracle[i] : Int(0);
    CHECK(snf.D.at(i, i) == expect);
  }
}

TEST_CASE("smith normal form on the named examples") {
  {
    SmithResult snf = smith_normal_form(make(1, 1, {1}));
    CHECK(snf.D.at(0, 0) == 1);
  }
  {
    SmithResult snf = smith_normal_form(make(2, 2, {2, 0, 0, 2}));
    CHECK(snf.D.at(0, 0) == 2);
    CHECK(snf.D.at(1, 1) == 2);
  }
  {
    // Expected diagonal frozen from the determinantal-divisor oracle:
    // gcd(entries) = 2, gcd(2-minors) = 4, |det| = 624, so (2, 2, 156).
    IntMat m = make(3, 3, {2, 4, 4, -6, 6, 12, 10, 4, 16});
    check_snf(m);
    SmithResult snf = smith_normal_form(m);
    CHECK(snf.D.at(0, 0) == 2);
    CHECK(snf.D.at(1, 1) == 2);
    CHECK(snf.D.at(2, 2) == 156);
  }
  {
    SmithResult snf = smith_normal_form(make(2, 2, {0, 0, 0, 0}));
    CHECK(snf.D.at(0, 0) == 0);
    CHECK(snf.D.at(1, 1) == 0);
  }
}

TEST_CASE("smith normal form against the minor-gcd oracle on random matrices") {
  Rng rng(7);
  for (int round = 0; round < 40; ++round) {
    std::size_t rows = static_cast<std::size_t>(rng.next_int(1, 4));
    std::size_t cols = static_cast<std::size_t>(rng.next_int(1, 4));
    IntMat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = Int(rng.next_int(-9, 9));
    check_snf(m);
  }
}

TEST_CASE("differences_generate_lattice on the named examples") {
  CHECK(differences_generate_lattice({{0}, {1}}));
  CHECK_FALSE(differences_generate_lattice({{0, 0}, {2, 0}, {0, 2}}));
  CHECK(differences_generate_lattice({{1}, {3}, {0}}));
  CHECK_FALSE(differences_generate_lattice({{0}}));
  CHECK_THROWS_AS(differences_generate_lattice({}), input_error);
  CHECK_THROWS_AS(differences_generate_lattice({{0}, {1, 2}}), input_error);
}

namespace {

// Brute force: do integer combinations of the base differences reach e_1 and
// e_2 with coefficients in a box?
bool brute_force_generates(const std::vector<LatticeVector>& a) {
  std::vector<LatticeVector> diffs;
  for (std::size_t i = 1; i < a.size(); ++i) diffs.push_back(lv_sub(a[i], a[0]));
  const std::int64_t box = 8;
  auto reaches = [&](std::int64_t tx, std::int64_t ty) {
    std::vector<std::int64_t> coef(diffs.size(), -box);
    if (diffs.empty()) return tx == 0 && ty == 0;
    for (;;) {
      std::int64_t sx = 0, sy = 0;
      for (std::size_t i = 0; i < diffs.size(); ++i) {
        sx += coef[i] * diffs[i][0];
        sy += coef[i] * diffs[i][1];
      }
      if (sx == tx && sy == ty) return true;
      std::size_t p = coef.size();
      while (p > 0 && coef[p - 1] == box) --p;
      if (p == 0) return false;
      ++coef[p - 1];
      for (std::size_t q = p; q < coef.size(); ++q) coef[q] = -box;
    }
  };
  return reaches(1, 0) && reaches(0, 1);
}

} // namespace

TEST_CASE("differences_generate_lattice agrees with brute force on subsets of {0..3}^2") {
  std::vector<LatticeVector> grid;
  for (std::int64_t x = 0; x <= 3; ++x)
    for (std::int64_t y = 0; y <= 3; ++y) grid.push_back({x, y});

  // All subsets of size 2..4 with a fixed first element keep the runtime sane
  // while still exercising every lattice pattern through translation
  // invariance of the difference set.
  std::size_t checked = 0;
  for (std::size_t b = 1; b < grid.size(); ++b)
    for (std::size_t c = b; c < grid.size(); ++c)
      for (std::size_t d = c; d < grid.size(); ++d) {
        std::vector<LatticeVector> subset{grid[0], grid[b]};
        if (c != b) subset.push_back(grid[c]);
        if (d != c) subset.push_back(grid[d]);
        CHECK(differences_generate_lattice(subset) == brute_force_generates(subset));
        ++checked;
      }
  CHECK(checked > 100);
}

TEST_CASE("apply_unimodular on the named examples") {
  UnimodularAffineMap id{IntMat::identity(2), {Rat(0), Rat(0)}};
  CHECK(apply_unimodular(id, {Rat(1), Rat(2)}) == QVec{Rat(1), Rat(2)});

  UnimodularAffineMap shear{make(2, 2, {1, 1, 0, 1}), {Rat(0), Rat(0)}};
  CHECK(apply_unimodular(shear, {Rat(1), Rat(0)}) == QVec{Rat(1), Rat(0)});

  UnimodularAffineMap swap{make(2, 2, {0, 1, 1, 0}), {Rat(1), Rat(0)}};
  CHECK(apply_unimodular(swap, {Rat(2), Rat(3)}) == QVec{Rat(4), Rat(2)});
}

TEST_CASE("unimodular maps compose and preserve lattice points") {
  Rng rng(11);
  UnimodularAffineMap t1{make(2, 2, {1, 2, 0, 1}), {Rat(3), Rat(-1)}};
  UnimodularAffineMap t2{make(2, 2, {0, -1, 1, 0}), {Rat(0), Rat(5)}};
  t1.validate();
  t2.validate();
  UnimodularAffineMap both = compose(t2, t1);
  both.validate();
  for (int round = 0; round < 20; ++round) {
    QVec p{Rat(rng.next_int(-5, 5)), Rat(rng.next_int(-5, 5))};
    CHECK(apply_unimodular(both, p) == apply_unimodular(t2, apply_unimodular(t1, p)));
    QVec image = apply_unimodular(both, p);
    for (const auto& x : image) CHECK(rat_den(x) == 1);
  }
  UnimodularAffineMap bad{make(2, 2, {2, 0, 0, 1}), {Rat(0), Rat(0)}};
  CHECK_THROWS_AS(bad.validate(), input_error);
}

} // namespace
