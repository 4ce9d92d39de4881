#ifndef OKFLOW_LATTICE_HPP
#define OKFLOW_LATTICE_HPP

#include "okflow/rational.hpp"

#include <cstdint>
#include <set>
#include <vector>

namespace okflow {

// Exponent vectors, valuation values and weight vectors all live in Z^n at
// desk scale; 64-bit coordinates are ample. Matrix entries use arbitrary
// precision because row/column reduction can grow intermediates.
using LatticeVector = std::vector<std::int64_t>;

std::int64_t lv_dot(const LatticeVector& a, const LatticeVector& b);
std::int64_t lv_total_degree(const LatticeVector& a);
LatticeVector lv_sub(const LatticeVector& a, const LatticeVector& b);
LatticeVector lv_add(const LatticeVector& a, const LatticeVector& b);

// Lexicographic order, coordinate 1 most significant. This is the fixed total
// order behind the valuation; smaller means earlier initial term.
bool lex_less(const LatticeVector& a, const LatticeVector& b);

// Dense integer matrix, row-major.
class IntMat {
public:
  IntMat() : rows_(0), cols_(0) {}
  IntMat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Int(0)) {}

  static IntMat identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Int& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Int& at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  IntMat operator*(const IntMat& rhs) const;
  bool operator==(const IntMat& rhs) const = default;

private:
  std::size_t rows_, cols_;
  std::vector<Int> data_;
};

// Exact determinant (square matrices only), Bareiss fraction-free elimination.
Int det(const IntMat& m);

struct SmithResult {
  IntMat U; // rows x rows, |det| = 1
  IntMat D; // diagonal with divisibility chain d1 | d2 | ...
  IntMat V; // cols x cols, |det| = 1
};

// U*M*V = D with D diagonal, nonnegative, d1 | d2 | ... A zero matrix gives D = 0.
SmithResult smith_normal_form(const IntMat& m);

// True iff the differences of the elements of A span Z^n. Throws input_error
// on empty input or mixed arities.
bool differences_generate_lattice(const std::vector<LatticeVector>& a);

// W in GL(n, Z) together with a rational translation.
struct UnimodularAffineMap {
  IntMat w;
  QVec a;

  // Throws input_error unless |det w| = 1 and sizes agree.
  void validate() const;
};

// Returns W*p + a. Arities must match.
QVec apply_unimodular(const UnimodularAffineMap& t, const QVec& p);

UnimodularAffineMap compose(const UnimodularAffineMap& outer, const UnimodularAffineMap& inner);

} // namespace okflow

#endif
