#include "okflow/linprog.hpp"

#include "okflow/errors.hpp"

#include <algorithm>

namespace okflow {

namespace {

class Tableau {
public:
  // rows: m; columns: structural + slack + artificial, then rhs last.
  Tableau(const QMat& a, const QVec& b) : m_(a.size()), n_(a.empty() ? 0 : a[0].size()) {
    nslack_ = m_;
    nart_ = m_;
    ncols_ = n_ + nslack_ + nart_;
    t_.assign(m_, QVec(ncols_ + 1, Rat(0)));
    basis_.resize(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      int sgn = b[i] < 0 ? -1 : 1;
      for (std::size_t j = 0; j < n_; ++j) t_[i][j] = Rat(sgn) * a[i][j];
      t_[i][n_ + i] = Rat(sgn); // slack
      t_[i][n_ + nslack_ + i] = 1; // artificial
      t_[i][ncols_] = Rat(sgn) * b[i];
      basis_[i] = n_ + nslack_ + i;
    }
  }

  bool is_artificial(std::size_t j) const { return j >= n_ + nslack_; }

  // Bland's rule; banned columns never enter. Returns the status.
  LpResult::Status run(const QVec& cost, bool ban_artificials) {
    for (;;) {
      // Reduced costs r_j = cost_j - y . column_j with y_i = cost[basis_i].
      std::size_t enter = ncols_;
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (ban_artificials && is_artificial(j)) continue;
        Rat r = cost[j];
        for (std::size_t i = 0; i < m_; ++i)
          if (cost[basis_[i]] != 0) r -= cost[basis_[i]] * t_[i][j];
        if (r > 0) {
          enter = j;
          break;
        }
      }
      if (enter == ncols_) return LpResult::Status::Optimal;

      std::size_t leave = m_;
      Rat best_ratio = 0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (t_[i][enter] <= 0) continue;
        Rat ratio = t_[i][ncols_] / t_[i][enter];
        if (leave == m_ || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == m_) return LpResult::Status::Unbounded;
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    Rat p = t_[row][col];
    for (auto& x : t_[row]) x /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row || t_[i][col] == 0) continue;
      Rat f = t_[i][col];
      for (std::size_t j = 0; j <= ncols_; ++j) t_[i][j] -= f * t_[row][j];
    }
    basis_[row] = col;
  }

  Rat objective(const QVec& cost) const {
    Rat z = 0;
    for (std::size_t i = 0; i < m_; ++i) z += cost[basis_[i]] * t_[i][ncols_];
    return z;
  }

  // Pivot basic artificials out where possible (their value is zero after a
  // feasible phase 1); rows that cannot pivot are redundant and harmless as
  // long as artificials are banned from entering.
  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      for (std::size_t j = 0; j < n_ + nslack_; ++j)
        if (t_[i][j] != 0) {
          pivot(i, j);
          break;
        }
    }
  }

  QVec solution() const {
    QVec x(n_, Rat(0));
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] < n_) x[basis_[i]] = t_[i][ncols_];
    return x;
  }

  std::size_t n() const { return n_; }
  std::size_t ncols() const { return ncols_; }

private:
  std::size_t m_, n_, nslack_, nart_, ncols_;
  std::vector<QVec> t_;
  std::vector<std::size_t> basis_;
};

} // namespace

LpResult lp_maximize(const QMat& a, const QVec& b, const QVec& c) {
  if (a.size() != b.size()) throw input_error("lp_maximize: row count mismatch");
  for (const auto& row : a)
    if (row.size() != c.size()) throw input_error("lp_maximize: column count mismatch");
  if (a.empty()) return LpResult{LpResult::Status::Unbounded, Rat(0), QVec(c.size(), Rat(0))};

  Tableau t(a, b);

  // Phase 1: maximize -sum(artificials).
  QVec phase1(t.ncols(), Rat(0));
  for (std::size_t j = 0; j < t.ncols(); ++j)
    if (t.is_artificial(j)) phase1[j] = -1;
  if (t.run(phase1, false) != LpResult::Status::Optimal)
    throw input_error("lp_maximize: phase 1 unbounded (internal)");
  if (t.objective(phase1) != 0) return LpResult{LpResult::Status::Infeasible, Rat(0), {}};
  t.drive_out_artificials();

  // Phase 2.
  QVec phase2(t.ncols(), Rat(0));
  for (std::size_t j = 0; j < c.size(); ++j) phase2[j] = c[j];
  LpResult::Status st = t.run(phase2, true);
  if (st == LpResult::Status::Unbounded) return LpResult{st, Rat(0), {}};
  return LpResult{LpResult::Status::Optimal, t.objective(phase2), t.solution()};
}

} // namespace okflow
