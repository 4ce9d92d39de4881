#ifndef OKFLOW_SERIES_HPP
#define OKFLOW_SERIES_HPP

#include "okflow/lattice.hpp"
#include "okflow/rational.hpp"

#include <complex>
#include <map>
#include <string>
#include <vector>

namespace okflow {

// Exact multivariate power series truncated by total degree: coefficients of
// total degree <= trunc are exact, higher terms are unknown. When exact is
// set the series is a completely known polynomial and carries no unknown
// tail; arithmetic propagates the flag. Term keys are ordered by std::map's
// lexicographic vector order, which is exactly the valuation order
// (coordinate 1 most significant, min convention), so begin() is the initial
// term.
class TruncSeries {
public:
  TruncSeries() = default;
  TruncSeries(std::size_t arity, std::int64_t trunc, bool exact = false)
      : arity_(arity), trunc_(trunc), exact_(exact) {}

  static TruncSeries constant(std::size_t arity, const Rat& c, std::int64_t trunc, bool exact = true);
  static TruncSeries monomial(std::size_t arity, const LatticeVector& exp, const Rat& c, std::int64_t trunc,
                              bool exact = true);

  std::size_t arity() const { return arity_; }
  std::int64_t trunc() const { return trunc_; }
  bool exact() const { return exact_; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<LatticeVector, Rat>& terms() const { return terms_; }

  Rat coeff(const LatticeVector& exp) const;
  std::int64_t max_total_degree() const; // 0 for the zero series

  void set_coeff(const LatticeVector& exp, const Rat& c); // enforces degree <= trunc, drops zeros

  TruncSeries truncated(std::int64_t order) const; // lowers the order, drops exactness if it cuts
  TruncSeries derivative(std::size_t var) const;

  Rat eval(const QVec& point) const;
  std::complex<double> eval(const std::vector<std::complex<double>>& point) const;

  std::string to_json() const;
  static TruncSeries from_json(const std::string& text);

  // Term-level equality (arity + coefficients); trunc metadata is not compared.
  bool operator==(const TruncSeries& rhs) const { return arity_ == rhs.arity_ && terms_ == rhs.terms_; }

private:
  std::size_t arity_ = 0;
  std::int64_t trunc_ = 0;
  bool exact_ = false;
  std::map<LatticeVector, Rat> terms_;

  friend TruncSeries series_add(const TruncSeries&, const TruncSeries&);
  friend TruncSeries series_mul(const TruncSeries&, const TruncSeries&);
};

TruncSeries series_add(const TruncSeries& a, const TruncSeries& b);
TruncSeries series_sub(const TruncSeries& a, const TruncSeries& b);
TruncSeries series_scale(const TruncSeries& a, const Rat& c);
TruncSeries series_mul(const TruncSeries& a, const TruncSeries& b);

// Multiplicative inverse up to a's truncation order, by Newton iteration
// x <- x(2 - a x). Throws input_error("not a unit") on zero constant term.
TruncSeries series_invert(const TruncSeries& a);

// Substitutes args[i] for variable i of the exact polynomial poly.
TruncSeries series_compose(const TruncSeries& poly, const std::vector<TruncSeries>& args);

// Expands the dependent coordinate of G(u_1..u_n, y) = 0 around u = 0,
// y = y0, to total degree order. G's last variable is y. Checks G(0,y0) = 0
// and dG/dy(0,y0) != 0 exactly; series-Newton iteration afterwards.
TruncSeries implicit_solve(const TruncSeries& g, const Rat& y0, std::int64_t order);

// f(u) -> t^{-gamma.beta} f restricted to u_i = t^{gamma_i} u~_i, as a series
// in (u~_1..u~_n, t) with t the last variable. Requires gamma >= 1
// componentwise and gamma.alpha >= gamma.beta on the visible support.
TruncSeries substitute_weighted(const TruncSeries& f, const LatticeVector& gamma, const LatticeVector& beta);

} // namespace okflow

#endif
