#include "okflow/qlinalg.hpp"

#include "okflow/errors.hpp"

#include <algorithm>

namespace okflow {

std::size_t qmat_rank(QMat m) {
  if (m.empty()) return 0;
  const std::size_t cols = m[0].size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
    std::size_t p = rank;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[rank], m[p]);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == rank || m[i][c] == 0) continue;
      Rat f = m[i][c] / m[rank][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[rank][j];
    }
    ++rank;
  }
  return rank;
}

std::optional<QVec> qmat_solve(QMat a, QVec b) {
  const std::size_t rows = a.size();
  if (rows == 0) return QVec{};
  const std::size_t cols = a[0].size();
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_col;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t p = rank;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[rank], a[p]);
    std::swap(b[rank], b[p]);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == rank || a[i][c] == 0) continue;
      Rat f = a[i][c] / a[rank][c];
      for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[rank][j];
      b[i] -= f * b[rank];
    }
    pivot_col.push_back(c);
    ++rank;
  }
  if (rank < cols) return std::nullopt;
  for (std::size_t i = rank; i < rows; ++i)
    if (b[i] != 0) return std::nullopt;
  QVec x(cols, Rat(0));
  for (std::size_t i = 0; i < rank; ++i) x[pivot_col[i]] = b[i] / a[i][pivot_col[i]];
  return x;
}

Rat qmat_det(QMat m) {
  const std::size_t n = m.size();
  for (const auto& row : m)
    if (row.size() != n) throw input_error("qmat_det: not square");
  Rat d = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && m[p][c] == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      std::swap(m[p], m[c]);
      d = -d;
    }
    d *= m[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      if (m[i][c] == 0) continue;
      Rat f = m[i][c] / m[c][c];
      for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  return d;
}

} // namespace okflow
