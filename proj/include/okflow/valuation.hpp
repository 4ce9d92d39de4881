#ifndef OKFLOW_VALUATION_HPP
#define OKFLOW_VALUATION_HPP

#include "okflow/series.hpp"

#include <string>
#include <vector>

namespace okflow {

// Lex-min exponent of the visible support (coordinate 1 most significant,
// min convention). Throws truncation_error when the series vanishes up to its
// truncation order and is not known exactly; input_error on the exact zero.
LatticeVector lex_valuation(const TruncSeries& f);

struct ValuedSection {
  std::string id;
  TruncSeries series;
  LatticeVector beta;
  Rat lead_coeff;
};

ValuedSection make_valued_section(std::string id, TruncSeries series);

// A basis with pairwise-distinct valuation values and its value set A.
struct ValuedBasis {
  std::vector<ValuedSection> sections;
  std::vector<LatticeVector> value_set; // lex-sorted, one entry per section
};

// Exact elimination: while two members share a valuation value, subtract the
// multiple of the earlier one that cancels the later one's initial term. A
// member that drops to zero means either certified linear dependence (all
// inputs exact) or insufficient truncation.
ValuedBasis triangularize(const std::vector<TruncSeries>& sections, std::vector<std::string> ids = {});

struct PowerValueSet {
  std::vector<LatticeVector> values;   // A_k, lex-sorted
  std::int64_t k = 1;
  std::int64_t order = 0;              // truncation order the reduction ran at
  std::size_t dependents_dropped = 0;  // products that reduced to zero at this order
};

// A_k from all degree-k products of the basis, reduced to distinct values.
// Products that reduce to zero are dropped as dependent at this order (they
// span rather than form a basis); the count is reported.
PowerValueSet power_value_set(const ValuedBasis& basis, std::int64_t k);

struct SupportWithBeta {
  std::vector<LatticeVector> support;
  LatticeVector beta;
};

// Smallest weight vector (by max-norm, then lex) with gamma.beta_j strictly
// minimal over every truncated support. Throws input_error when no gamma
// within the bound works.
LatticeVector choose_gamma(const std::vector<SupportWithBeta>& supports, std::int64_t bound = 10);

bool check_lattice_condition(const ValuedBasis& basis);

} // namespace okflow

#endif
