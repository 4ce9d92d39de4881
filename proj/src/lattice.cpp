#include "okflow/lattice.hpp"

#include "okflow/errors.hpp"

#include <algorithm>

namespace okflow {

std::int64_t lv_dot(const LatticeVector& a, const LatticeVector& b) {
  if (a.size() != b.size()) throw input_error("lattice vector arity mismatch");
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::int64_t lv_total_degree(const LatticeVector& a) {
  std::int64_t s = 0;
  for (auto x : a) s += x;
  return s;
}

LatticeVector lv_sub(const LatticeVector& a, const LatticeVector& b) {
  if (a.size() != b.size()) throw input_error("lattice vector arity mismatch");
  LatticeVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

LatticeVector lv_add(const LatticeVector& a, const LatticeVector& b) {
  if (a.size() != b.size()) throw input_error("lattice vector arity mismatch");
  LatticeVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

bool lex_less(const LatticeVector& a, const LatticeVector& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

IntMat IntMat::identity(std::size_t n) {
  IntMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMat IntMat::operator*(const IntMat& rhs) const {
  if (cols_ != rhs.rows_) throw input_error("matrix product shape mismatch");
  IntMat r(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      const Int& lik = at(i, k);
      if (lik == 0) continue;
      for (std::size_t j = 0; j < rhs.cols_; ++j) r.at(i, j) += lik * rhs.at(k, j);
    }
  return r;
}

Int det(const IntMat& m) {
  if (m.rows() != m.cols()) throw input_error("det: matrix not square");
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  IntMat a = m;
  Int sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a.at(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a.at(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a.at(i, j) = (a.at(i, j) * a.at(k, k) - a.at(i, k) * a.at(k, j)) / prev;
    prev = a.at(k, k);
  }
  return sign * a.at(n - 1, n - 1);
}

namespace {

struct SnfState {
  IntMat u, d, v;

  void swap_rows(std::size_t i, std::size_t j) {
    for (std::size_t c = 0; c < d.cols(); ++c) std::swap(d.at(i, c), d.at(j, c));
    for (std::size_t c = 0; c < u.cols(); ++c) std::swap(u.at(i, c), u.at(j, c));
  }
  void swap_cols(std::size_t i, std::size_t j) {
    for (std::size_t r = 0; r < d.rows(); ++r) std::swap(d.at(r, i), d.at(r, j));
    for (std::size_t r = 0; r < v.rows(); ++r) std::swap(v.at(r, i), v.at(r, j));
  }
  // row i -= q * row j
  void row_op(std::size_t i, std::size_t j, const Int& q) {
    for (std::size_t c = 0; c < d.cols(); ++c) d.at(i, c) -= q * d.at(j, c);
    for (std::size_t c = 0; c < u.cols(); ++c) u.at(i, c) -= q * u.at(j, c);
  }
  // col i -= q * col j
  void col_op(std::size_t i, std::size_t j, const Int& q) {
    for (std::size_t r = 0; r < d.rows(); ++r) d.at(r, i) -= q * d.at(r, j);
    for (std::size_t r = 0; r < v.rows(); ++r) v.at(r, i) -= q * v.at(r, j);
  }
  void negate_row(std::size_t i) {
    for (std::size_t c = 0; c < d.cols(); ++c) d.at(i, c) = -d.at(i, c);
    for (std::size_t c = 0; c < u.cols(); ++c) u.at(i, c) = -u.at(i, c);
  }
};

} // namespace

SmithResult smith_normal_form(const IntMat& m) {
  SnfState s{IntMat::identity(m.rows()), m, IntMat::identity(m.cols())};
  const std::size_t nmin = std::min(m.rows(), m.cols());

  for (std::size_t k = 0; k < nmin; ++k) {
    // Pivot: smallest nonzero absolute value in the trailing block.
    std::size_t pi = k, pj = k;
    bool found = false;
    for (std::size_t i = k; i < m.rows(); ++i)
      for (std::size_t j = k; j < m.cols(); ++j) {
        const Int& x = s.d.at(i, j);
        if (x == 0) continue;
        if (!found || int_abs(x) < int_abs(s.d.at(pi, pj))) {
          pi = i;
          pj = j;
          found = true;
        }
      }
    if (!found) break; // trailing block all zero
    if (pi != k) s.swap_rows(k, pi);
    if (pj != k) s.swap_cols(k, pj);

    // Clear row k and column k; a nonzero remainder becomes the new, smaller
    // pivot, so this terminates.
    bool dirty = true;
    while (dirty) {
      dirty = false;
      for (std::size_t i = k + 1; i < m.rows(); ++i) {
        if (s.d.at(i, k) == 0) continue;
        Int q = s.d.at(i, k) / s.d.at(k, k);
        s.row_op(i, k, q);
        if (s.d.at(i, k) != 0) {
          s.swap_rows(k, i);
          dirty = true;
        }
      }
      for (std::size_t j = k + 1; j < m.cols(); ++j) {
        if (s.d.at(k, j) == 0) continue;
        Int q = s.d.at(k, j) / s.d.at(k, k);
        s.col_op(j, k, q);
        if (s.d.at(k, j) != 0) {
          s.swap_cols(k, j);
          dirty = true;
        }
      }
    }

    // Divisibility: if some trailing entry is not divisible by the pivot,
    // fold its row into row k and redo this pivot.
    bool redo = false;
    for (std::size_t i = k + 1; i < m.rows() && !redo; ++i)
      for (std::size_t j = k + 1; j < m.cols() && !redo; ++j)
        if (s.d.at(i, j) % s.d.at(k, k) != 0) {
          s.row_op(k, i, Int(-1)); // row k += row i
          redo = true;
        }
    if (redo) {
      --k;
      continue;
    }
    if (s.d.at(k, k) < 0) s.negate_row(k);
  }
  return SmithResult{s.u, s.d, s.v};
}

bool differences_generate_lattice(const std::vector<LatticeVector>& a) {
  if (a.empty()) throw input_error("differences_generate_lattice: empty set");
  const std::size_t n = a[0].size();
  for (const auto& v : a)
    if (v.size() != n) throw input_error("differences_generate_lattice: mixed arities");
  if (n == 0) return true;
  if (a.size() == 1) return false;

  // The difference lattice is generated by a_i - a_0.
  IntMat diff(n, a.size() - 1);
  for (std::size_t j = 1; j < a.size(); ++j)
    for (std::size_t i = 0; i < n; ++i) diff.at(i, j - 1) = Int(a[j][i] - a[0][i]);

  SmithResult snf = smith_normal_form(diff);
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= snf.D.cols()) return false;
    if (snf.D.at(i, i) != 1) return false;
  }
  return true;
}

void UnimodularAffineMap::validate() const {
  if (w.rows() != w.cols()) throw input_error("unimodular map: W not square");
  if (a.size() != w.rows()) throw input_error("unimodular map: translation arity mismatch");
  Int d = det(w);
  if (d != 1 && d != -1) throw input_error("unimodular map: |det W| != 1");
}

QVec apply_unimodular(const UnimodularAffineMap& t, const QVec& p) {
  if (p.size() != t.w.cols()) throw input_error("apply_unimodular: arity mismatch");
  QVec r(t.w.rows(), Rat(0));
  for (std::size_t i = 0; i < t.w.rows(); ++i) {
    Rat s = t.a.empty() ? Rat(0) : t.a[i];
    for (std::size_t j = 0; j < t.w.cols(); ++j) s += Rat(t.w.at(i, j)) * p[j];
    r[i] = s;
  }
  return r;
}

UnimodularAffineMap compose(const UnimodularAffineMap& outer, const UnimodularAffineMap& inner) {
  UnimodularAffineMap r;
  r.w = outer.w * inner.w;
  r.a = apply_unimodular(outer, inner.a);
  return r;
}

} // namespace okflow
