#include "okflow/valuation.hpp"

#include "okflow/errors.hpp"

#include <algorithm>
#include <set>

namespace okflow {

LatticeVector lex_valuation(const TruncSeries& f) {
  if (f.is_zero()) {
    if (f.exact()) throw input_error("lex_valuation: zero series has no valuation");
    throw truncation_error("lex_valuation: valuation undetermined at this truncation order (order " +
                           std::to_string(f.trunc()) + ")");
  }
  return f.terms().begin()->first;
}

ValuedSection make_valued_section(std::string id, TruncSeries series) {
  LatticeVector beta = lex_valuation(series);
  Rat c = series.coeff(beta);
  return ValuedSection{std::move(id), std::move(series), std::move(beta), std::move(c)};
}

namespace {

// Reduces f against the established sections until its value is fresh or it
// vanishes. Returns nullopt on vanishing (caller decides what that means).
std::optional<ValuedSection> reduce_to_fresh_value(TruncSeries f, const std::string& id,
                                                   const std::vector<ValuedSection>& established) {
  for (;;) {
    if (f.is_zero()) return std::nullopt;
    LatticeVector beta = f.terms().begin()->first;
    const ValuedSection* hit = nullptr;
    for (const auto& s : established)
      if (s.beta == beta) {
        hit = &s;
        break;
      }
    if (!hit) return make_valued_section(id, std::move(f));
    Rat factor = f.coeff(beta) / hit->lead_coeff;
    f = series_sub(f, series_scale(hit->series, factor));
  }
}

} // namespace

ValuedBasis triangularize(const std::vector<TruncSeries>& sections, std::vector<std::string> ids) {
  if (sections.empty()) throw input_error("triangularize: empty input");
  for (const auto& s : sections)
    if (s.arity() != sections[0].arity()) throw input_error("triangularize: arity mismatch");
  if (ids.empty())
    for (std::size_t i = 0; i < sections.size(); ++i) ids.push_back("s" + std::to_string(i + 1));
  if (ids.size() != sections.size()) throw input_error("triangularize: id count mismatch");

  bool all_exact = std::all_of(sections.begin(), sections.end(), [](const TruncSeries& s) { return s.exact(); });
  std::int64_t order = sections[0].trunc();
  for (const auto& s : sections) order = std::min(order, s.exact() ? order : s.trunc());

  ValuedBasis out;
  for (std::size_t i = 0; i < sections.size(); ++i) {
    auto reduced = reduce_to_fresh_value(sections[i], ids[i], out.sections);
    if (!reduced) {
      if (all_exact) throw input_error("triangularize: linearly dependent input (section '" + ids[i] + "')");
      throw truncation_error("triangularize: section '" + ids[i] + "' dependent at order " + std::to_string(order) +
                             " (truncation insufficient to certify independence)");
    }
    out.sections.push_back(std::move(*reduced));
  }
  for (const auto& s : out.sections) out.value_set.push_back(s.beta);
  std::sort(out.value_set.begin(), out.value_set.end(), lex_less);
  return out;
}

PowerValueSet power_value_set(const ValuedBasis& basis, std::int64_t k) {
  if (k < 1) throw input_error("power_value_set: k must be >= 1");
  if (basis.sections.empty()) throw input_error("power_value_set: empty basis");

  std::int64_t max_lead_degree = 0;
  std::int64_t order = basis.sections[0].series.trunc();
  for (const auto& s : basis.sections) {
    max_lead_degree = std::max(max_lead_degree, lv_total_degree(s.beta));
    if (!s.series.exact()) order = std::min(order, s.series.trunc());
  }
  if (order < k * max_lead_degree)
    throw truncation_error("power_value_set: truncation order " + std::to_string(order) +
                           " below k * max leading degree = " + std::to_string(k * max_lead_degree));

  // All degree-k products, in lex order of index multisets.
  const std::size_t r = basis.sections.size();
  std::vector<std::vector<std::size_t>> multisets;
  std::vector<std::size_t> cur(k, 0);
  for (;;) {
    multisets.push_back(cur);
    std::int64_t i = k - 1;
    while (i >= 0 && cur[i] == r - 1) --i;
    if (i < 0) break;
    ++cur[i];
    for (std::size_t j = i + 1; j < static_cast<std::size_t>(k); ++j) cur[j] = cur[i];
  }

  PowerValueSet out;
  out.k = k;
  out.order = order;
  std::vector<ValuedSection> established;
  for (const auto& ms : multisets) {
    TruncSeries prod = basis.sections[ms[0]].series;
    LatticeVector expect = basis.sections[ms[0]].beta;
    for (std::size_t i = 1; i < ms.size(); ++i) {
      prod = series_mul(prod, basis.sections[ms[i]].series);
      expect = lv_add(expect, basis.sections[ms[i]].beta);
    }
    // v(fg) = v(f) + v(g): rational coefficients have no zero divisors.
    if (lex_valuation(prod) != expect)
      throw truncation_error("power_value_set: product valuation disagrees with additivity (truncation too low)");
    auto reduced = reduce_to_fresh_value(std::move(prod), "", established);
    if (!reduced) {
      ++out.dependents_dropped;
      continue;
    }
    established.push_back(std::move(*reduced));
  }
  for (const auto& s : established) out.values.push_back(s.beta);
  std::sort(out.values.begin(), out.values.end(), lex_less);
  return out;
}

LatticeVector choose_gamma(const std::vector<SupportWithBeta>& supports, std::int64_t bound) {
  if (supports.empty()) throw input_error("choose_gamma: empty input");
  const std::size_t n = supports[0].beta.size();
  for (const auto& s : supports) {
    if (s.beta.size() != n) throw input_error("choose_gamma: arity mismatch");
    for (const auto& alpha : s.support) {
      if (alpha.size() != n) throw input_error("choose_gamma: arity mismatch");
      if (!lex_less(s.beta, alpha) && alpha != s.beta)
        throw input_error("choose_gamma: beta is not the lex-min of its support");
    }
  }

  auto separates = [&](const LatticeVector& gamma) {
    for (const auto& s : supports) {
      std::int64_t gb = lv_dot(gamma, s.beta);
      for (const auto& alpha : s.support)
        if (alpha != s.beta && lv_dot(gamma, alpha) <= gb) return false;
    }
    return true;
  };

  // Increasing max-norm, lex within a level.
  for (std::int64_t m = 1; m <= bound; ++m) {
    LatticeVector gamma(n, 1);
    for (;;) {
      if (*std::max_element(gamma.begin(), gamma.end()) == m && separates(gamma)) return gamma;
      std::int64_t i = static_cast<std::int64_t>(n) - 1;
      while (i >= 0 && gamma[i] == m) --i;
      if (i < 0) break;
      ++gamma[i];
      for (std::size_t j = i + 1; j < n; ++j) gamma[j] = 1;
    }
  }
  throw input_error("choose_gamma: no separating weight found within bound " + std::to_string(bound) +
                    " (raise bound or truncation)");
}

bool check_lattice_condition(const ValuedBasis& basis) {
  std::vector<LatticeVector> a = basis.value_set;
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return differences_generate_lattice(a);
}

} // namespace okflow
