#include "okflow/series.hpp"

#include "okflow/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <limits>

namespace okflow {

namespace {

constexpr std::int64_t kEffInf = std::numeric_limits<std::int64_t>::max() / 4;

std::int64_t effective_order(const TruncSeries& s) { return s.exact() ? kEffInf : s.trunc(); }

void check_arity(const TruncSeries& a, const TruncSeries& b, const char* op) {
  if (a.arity() != b.arity()) throw input_error(std::string(op) + ": arity mismatch");
}

} // namespace

TruncSeries TruncSeries::constant(std::size_t arity, const Rat& c, std::int64_t trunc, bool exact) {
  TruncSeries s(arity, trunc, exact);
  if (c != 0) s.terms_[LatticeVector(arity, 0)] = c;
  return s;
}

TruncSeries TruncSeries::monomial(std::size_t arity, const LatticeVector& exp, const Rat& c, std::int64_t trunc,
                                  bool exact) {
  if (exp.size() != arity) throw input_error("monomial: exponent arity mismatch");
  for (auto e : exp)
    if (e < 0) throw input_error("monomial: negative exponent");
  TruncSeries s(arity, trunc, exact);
  if (c != 0 && lv_total_degree(exp) <= trunc) s.terms_[exp] = c;
  return s;
}

Rat TruncSeries::coeff(const LatticeVector& exp) const {
  auto it = terms_.find(exp);
  return it == terms_.end() ? Rat(0) : it->second;
}

std::int64_t TruncSeries::max_total_degree() const {
  std::int64_t m = 0;
  for (const auto& [e, c] : terms_) m = std::max(m, lv_total_degree(e));
  return m;
}

void TruncSeries::set_coeff(const LatticeVector& exp, const Rat& c) {
  if (exp.size() != arity_) throw input_error("set_coeff: exponent arity mismatch");
  if (c == 0) {
    terms_.erase(exp);
    return;
  }
  if (lv_total_degree(exp) > trunc_) throw input_error("set_coeff: exponent beyond truncation order");
  terms_[exp] = c;
}

TruncSeries TruncSeries::truncated(std::int64_t order) const {
  // Raising the order of a truncated series would claim exactness we do not
  // have; only fully known polynomials may extend their order.
  std::int64_t effective = exact_ ? order : std::min(order, trunc_);
  TruncSeries out(arity_, effective, exact_ && max_total_degree() <= effective);
  for (const auto& [e, c] : terms_)
    if (lv_total_degree(e) <= effective) out.terms_[e] = c;
  return out;
}

TruncSeries TruncSeries::derivative(std::size_t var) const {
  if (var >= arity_) throw input_error("derivative: variable index out of range");
  TruncSeries out(arity_, exact_ ? trunc_ : trunc_ - 1, exact_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    LatticeVector d = e;
    d[var] -= 1;
    out.terms_[d] = c * Int(e[var]);
  }
  return out;
}

Rat TruncSeries::eval(const QVec& point) const {
  if (point.size() != arity_) throw input_error("eval: arity mismatch");
  Rat total = 0;
  for (const auto& [e, c] : terms_) {
    Rat m = c;
    for (std::size_t i = 0; i < arity_; ++i)
      for (std::int64_t k = 0; k < e[i]; ++k) m *= point[i];
    total += m;
  }
  return total;
}

std::complex<double> TruncSeries::eval(const std::vector<std::complex<double>>& point) const {
  if (point.size() != arity_) throw input_error("eval: arity mismatch");
  std::complex<double> total = 0.0;
  for (const auto& [e, c] : terms_) {
    std::complex<double> m = rat_to_double(c);
    for (std::size_t i = 0; i < arity_; ++i)
      for (std::int64_t k = 0; k < e[i]; ++k) m *= point[i];
    total += m;
  }
  return total;
}

TruncSeries series_add(const TruncSeries& a, const TruncSeries& b) {
  check_arity(a, b, "series_add");
  std::int64_t order = std::min(effective_order(a), effective_order(b));
  bool exact = a.exact() && b.exact();
  TruncSeries out(a.arity(), exact ? std::max(a.trunc(), b.trunc()) : order, exact);
  for (const auto& [e, c] : a.terms_)
    if (lv_total_degree(e) <= out.trunc_) out.terms_[e] = c;
  for (const auto& [e, c] : b.terms_) {
    if (lv_total_degree(e) > out.trunc_) continue;
    auto [it, fresh] = out.terms_.try_emplace(e, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) out.terms_.erase(it);
    }
  }
  return out;
}

TruncSeries series_sub(const TruncSeries& a, const TruncSeries& b) { return series_add(a, series_scale(b, Rat(-1))); }

TruncSeries series_scale(const TruncSeries& a, const Rat& c) {
  TruncSeries out(a.arity(), a.trunc(), a.exact());
  if (c == 0) return out;
  for (const auto& [e, coef] : a.terms()) out.set_coeff(e, coef * c);
  return out;
}

TruncSeries series_mul(const TruncSeries& a, const TruncSeries& b) {
  check_arity(a, b, "series_mul");
  bool exact = a.exact() && b.exact();
  // Conservative order for truncated inputs: min of the two. Products of
  // fully known polynomials keep every term.
  std::int64_t order = exact ? std::max({a.trunc(), b.trunc(), a.max_total_degree() + b.max_total_degree()})
                             : std::min(effective_order(a), effective_order(b));
  TruncSeries out(a.arity(), order, exact);
  for (const auto& [ea, ca] : a.terms_) {
    std::int64_t da = lv_total_degree(ea);
    for (const auto& [eb, cb] : b.terms_) {
      if (da + lv_total_degree(eb) > order) continue;
      LatticeVector e = lv_add(ea, eb);
      auto [it, fresh] = out.terms_.try_emplace(e, ca * cb);
      if (!fresh) it->second += ca * cb;
    }
  }
  std::erase_if(out.terms_, [](const auto& kv) { return kv.second == 0; });
  return out;
}

TruncSeries series_invert(const TruncSeries& a) {
  const LatticeVector zero(a.arity(), 0);
  Rat a0 = a.coeff(zero);
  if (a0 == 0) throw input_error("series_invert: not a unit");
  std::int64_t order = a.trunc();
  if (a.terms().size() == 1 && a.exact()) {
    // A nonzero constant inverts exactly.
    if (a.terms().begin()->first == zero) return TruncSeries::constant(a.arity(), Rat(1) / a0, order, true);
  }
  TruncSeries x = TruncSeries::constant(a.arity(), Rat(1) / a0, order, false);
  TruncSeries two = TruncSeries::constant(a.arity(), Rat(2), order, false);
  TruncSeries aa = a.truncated(order);
  for (std::int64_t correct = 1; correct <= order; correct *= 2)
    x = series_mul(x, series_sub(two, series_mul(aa, x)));
  return x;
}

TruncSeries series_compose(const TruncSeries& poly, const std::vector<TruncSeries>& args) {
  if (!poly.exact()) throw input_error("series_compose: composition base must be an exact polynomial");
  if (args.size() != poly.arity()) throw input_error("series_compose: argument count mismatch");
  if (args.empty()) throw input_error("series_compose: no arguments");
  const std::size_t out_arity = args[0].arity();
  std::int64_t order = kEffInf;
  bool exact = true;
  for (const auto& s : args) {
    if (s.arity() != out_arity) throw input_error("series_compose: argument arity mismatch");
    order = std::min(order, effective_order(s));
    exact = exact && s.exact();
  }
  if (order == kEffInf) order = 0;
  // Power cache per variable.
  std::vector<std::vector<TruncSeries>> powers(args.size());
  auto power = [&](std::size_t var, std::int64_t k) -> const TruncSeries& {
    auto& cache = powers[var];
    if (cache.empty()) cache.push_back(TruncSeries::constant(out_arity, Rat(1), exact ? args[var].trunc() : order, exact));
    while (static_cast<std::int64_t>(cache.size()) <= k) cache.push_back(series_mul(cache.back(), args[var]));
    return cache[k];
  };
  TruncSeries total(out_arity, order, exact);
  for (const auto& [e, c] : poly.terms()) {
    TruncSeries term = TruncSeries::constant(out_arity, c, exact ? 0 : order, exact);
    for (std::size_t v = 0; v < args.size(); ++v)
      if (e[v] > 0) term = series_mul(term, power(v, e[v]));
    total = series_add(total, term);
  }
  return total;
}

TruncSeries implicit_solve(const TruncSeries& g, const Rat& y0, std::int64_t order) {
  if (!g.exact()) throw input_error("implicit_solve: defining polynomial must be exact");
  if (g.arity() < 1) throw input_error("implicit_solve: polynomial needs at least the dependent variable");
  if (order <= 0) throw input_error("implicit_solve: truncation order must be positive");
  const std::size_t n = g.arity() - 1;

  QVec origin(g.arity(), Rat(0));
  origin[n] = y0;
  Rat residual = g.eval(origin);
  if (residual != 0)
    throw input_error("implicit_solve: point not on variety (residual = " + rat_str(residual) + ")");
  TruncSeries gy = g.derivative(n);
  if (gy.eval(origin) == 0)
    throw input_error("implicit_solve: coordinate system not transverse (dG/dy vanishes at the point)");

  std::vector<TruncSeries> args;
  for (std::size_t i = 0; i < n; ++i)
    args.push_back(TruncSeries::monomial(n, [&] {
      LatticeVector e(n, 0);
      e[i] = 1;
      return e;
    }(), Rat(1), order, false));
  TruncSeries y = TruncSeries::constant(n, y0, order, false);

  // Newton: correct mod degree 2^k after k steps.
  for (std::int64_t correct = 1; correct <= order; correct *= 2) {
    auto with_y = args;
    with_y.push_back(y);
    TruncSeries r = series_compose(g, with_y);
    TruncSeries dy = series_compose(gy, with_y);
    y = series_sub(y, series_mul(r, series_invert(dy))).truncated(order);
  }

  auto with_y = args;
  with_y.push_back(y);
  if (!series_compose(g, with_y).is_zero())
    throw truncation_error("implicit_solve: Newton iteration did not close at order " + std::to_string(order));
  return y;
}

TruncSeries substitute_weighted(const TruncSeries& f, const LatticeVector& gamma, const LatticeVector& beta) {
  const std::size_t n = f.arity();
  if (gamma.size() != n || beta.size() != n) throw input_error("substitute_weighted: arity mismatch");
  for (auto g : gamma)
    if (g < 1) throw input_error("substitute_weighted: gamma must be componentwise >= 1");
  const std::int64_t gb = lv_dot(gamma, beta);
  std::int64_t gmin = gamma.empty() ? 1 : *std::min_element(gamma.begin(), gamma.end());

  for (const auto& [e, c] : f.terms())
    if (lv_dot(gamma, e) < gb) throw input_error("substitute_weighted: beta is not gamma-minimal");

  // Unknown source terms have |alpha| > D and (by the recorded full-support
  // assumption) gamma.alpha >= gamma.beta, so their images have total degree
  // at least max(D + 1, (D+1)(1 + min gamma) - gamma.beta); everything below
  // is exact.
  std::int64_t order;
  if (f.exact()) {
    order = 0;
    for (const auto& [e, c] : f.terms())
      order = std::max(order, lv_total_degree(e) + lv_dot(gamma, e) - gb);
    order = std::max(order, f.trunc());
  } else {
    order = std::max(f.trunc(), (f.trunc() + 1) * (1 + gmin) - gb - 1);
  }

  TruncSeries out(n + 1, order, f.exact());
  for (const auto& [e, c] : f.terms()) {
    LatticeVector image(n + 1);
    std::copy(e.begin(), e.end(), image.begin());
    image[n] = lv_dot(gamma, e) - gb;
    if (lv_total_degree(image) <= order) out.set_coeff(image, c);
  }
  return out;
}

std::string TruncSeries::to_json() const {
  nlohmann::json j;
  j["arity"] = arity_;
  j["trunc"] = trunc_;
  j["exact"] = exact_;
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [e, c] : terms_) {
    nlohmann::json t;
    t["exp"] = e;
    t["num"] = rat_num(c).str();
    t["den"] = rat_den(c).str();
    terms.push_back(t);
  }
  j["terms"] = terms;
  return j.dump();
}

TruncSeries TruncSeries::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  TruncSeries s(j.at("arity").get<std::size_t>(), j.at("trunc").get<std::int64_t>(),
                j.value("exact", false));
  for (const auto& t : j.at("terms")) {
    LatticeVector e = t.at("exp").get<LatticeVector>();
    Rat c(Int(t.at("num").get<std::string>()), Int(t.at("den").get<std::string>()));
    s.set_coeff(e, c);
  }
  return s;
}

} // namespace okflow
