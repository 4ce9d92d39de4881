#ifndef OKFLOW_DEGENERATION_HPP
#define OKFLOW_DEGENERATION_HPP

#include "okflow/qlinalg.hpp"
#include "okflow/valuation.hpp"

#include <complex>
#include <string>
#include <vector>

namespace okflow {

// The degenerated family chart data: per-section series in (u~_1..u~_n, t)
// with monomial constant terms c_j u~^{beta_j}, plus the original series in u
// for the t != 0 chart. Valuation values may repeat across sections (the
// family is still an immersion as long as differences of the value set
// generate Z^n); the value set A keeps one copy of each.
struct DegenerationFamily {
  std::size_t n = 0;
  std::size_t r = 0;
  LatticeVector gamma;
  std::vector<std::string> ids;
  std::vector<TruncSeries> sections_tilde; // arity n+1, t last
  std::vector<TruncSeries> sections_orig;  // arity n
  std::vector<LatticeVector> betas;
  std::vector<Rat> lead_coeffs;
  std::vector<LatticeVector> value_set; // distinct betas, lex-sorted

  std::string to_json() const;
  static DegenerationFamily from_json(const std::string& text);
};

DegenerationFamily build_family(const std::vector<ValuedSection>& sections, const LatticeVector& gamma);

// Jacobian of the chart map (f~_j / f~_chart for j != chart, then t) at
// (u~, 0), in printed layout: row i = derivatives with respect to variable i
// (u~_1..u~_n, then t), one column per function. Exact entries, exact rank.
struct JacobianCertificate {
  std::size_t chart = 0; // section index whose affine chart is used
  QMat matrix;           // (n+1) x r
  std::size_t rank = 0;
};

JacobianCertificate jacobian_at_zero_fiber(const DegenerationFamily& fam, const QVec& u_tilde);

// Truncated evaluation of F at a chart point: unit-norm homogeneous
// coordinates plus the fiber value.
struct EmbeddedPoint {
  std::vector<std::complex<double>> homogeneous;
  std::complex<double> t;
};

EmbeddedPoint evaluate_embedding(const DegenerationFamily& fam, const std::vector<std::complex<double>>& u_tilde,
                                 std::complex<double> t);

} // namespace okflow

#endif
