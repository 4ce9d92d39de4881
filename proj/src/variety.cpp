#include "okflow/variety.hpp"

#include "okflow/errors.hpp"
#include "okflow/expr.hpp"
#include "okflow/qlinalg.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace okflow {

VarietySpec VarietySpec::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  VarietySpec spec;
  spec.name = j.value("name", "variety");
  spec.variables = j.at("variables").get<std::vector<std::string>>();
  for (const auto& c : j.at("point")) spec.point.push_back(rat_parse(c.get<std::string>()));
  spec.local_coords = j.at("local").get<std::vector<std::string>>();
  spec.defining = j.value("defining", std::vector<std::string>{});
  spec.tau = j.value("tau", "tau");
  for (const auto& s : j.at("sections"))
    spec.sections.push_back({s.at("id").get<std::string>(), s.at("expr").get<std::string>()});
  spec.trunc = j.value("trunc", std::int64_t{24});
  return spec;
}

VarietySpec VarietySpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open variety file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

namespace {

// Joint Newton for the dependent variables: y <- y - J^{-1} G(u, y) in the
// series ring, with the s x s series system solved by Cramer's rule (s is
// tiny at desk scale). Transversality = J(0, y0) invertible, checked exactly.
std::vector<TruncSeries> solve_dependents(const std::vector<TruncSeries>& defining, // arity n + s
                                          const QVec& y0, std::size_t n, std::int64_t order) {
  const std::size_t s = defining.size();
  std::vector<TruncSeries> u_args;
  for (std::size_t i = 0; i < n; ++i) {
    LatticeVector e(n, 0);
    e[i] = 1;
    u_args.push_back(TruncSeries::monomial(n, e, Rat(1), order, false));
  }

  std::vector<TruncSeries> y;
  for (std::size_t m = 0; m < s; ++m) y.push_back(TruncSeries::constant(n, y0[m], order, false));

  auto args_now = [&]() {
    std::vector<TruncSeries> args = u_args;
    for (const auto& ym : y) args.push_back(ym);
    return args;
  };

  std::vector<std::vector<TruncSeries>> jac(s); // dG_m / dy_l as polynomials
  for (std::size_t m = 0; m < s; ++m)
    for (std::size_t l = 0; l < s; ++l) jac[m].push_back(defining[m].derivative(n + l));

  // Exact transversality check at the point.
  QVec origin(n + s, Rat(0));
  for (std::size_t m = 0; m < s; ++m) origin[n + m] = y0[m];
  QMat j0(s, QVec(s));
  for (std::size_t m = 0; m < s; ++m)
    for (std::size_t l = 0; l < s; ++l) j0[m][l] = jac[m][l].eval(origin);
  if (qmat_det(j0) == 0)
    throw input_error("expand: coordinate system not transverse (dependent Jacobian singular at the point)");

  auto det_series = [&](const std::vector<std::vector<TruncSeries>>& m) {
    // Permutation expansion; s <= 3 in practice.
    std::vector<std::size_t> perm(s);
    for (std::size_t i = 0; i < s; ++i) perm[i] = i;
    TruncSeries total(n, order, false);
    do {
      std::size_t inversions = 0;
      for (std::size_t i = 0; i < s; ++i)
        for (std::size_t k = i + 1; k < s; ++k)
          if (perm[i] > perm[k]) ++inversions;
      TruncSeries prod = TruncSeries::constant(n, inversions % 2 ? Rat(-1) : Rat(1), order, false);
      for (std::size_t i = 0; i < s; ++i) prod = series_mul(prod, m[i][perm[i]]);
      total = series_add(total, prod);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total;
  };

  for (std::int64_t correct = 1; correct <= order; correct *= 2) {
    auto args = args_now();
    std::vector<TruncSeries> g;
    for (std::size_t m = 0; m < s; ++m) g.push_back(series_compose(defining[m], args));
    std::vector<std::vector<TruncSeries>> jval(s, std::vector<TruncSeries>{});
    for (std::size_t m = 0; m < s; ++m)
      for (std::size_t l = 0; l < s; ++l) jval[m].push_back(series_compose(jac[m][l], args));
    TruncSeries det = det_series(jval);
    TruncSeries det_inv = series_invert(det);
    // Cramer: delta_l = det(J with column l replaced by G) / det(J).
    for (std::size_t l = 0; l < s; ++l) {
      auto replaced = jval;
      for (std::size_t m = 0; m < s; ++m) replaced[m][l] = g[m];
      TruncSeries delta = series_mul(det_series(replaced), det_inv);
      y[l] = series_sub(y[l], delta).truncated(order);
    }
  }

  auto args = args_now();
  for (std::size_t m = 0; m < s; ++m)
    if (!series_compose(defining[m], args).is_zero())
      throw truncation_error("expand: Newton iteration did not close at order " + std::to_string(order));
  return y;
}

} // namespace

ExpandedSections expand_sections(const VarietySpec& spec, std::int64_t trunc_override) {
  const std::int64_t order = trunc_override > 0 ? trunc_override : spec.trunc;
  if (order <= 0) throw input_error("expand: truncation order must be positive");
  if (spec.point.size() != spec.variables.size()) throw input_error("expand: point arity mismatch");

  // Variable split, preserving declaration order.
  std::vector<std::size_t> local_idx, dep_idx;
  for (std::size_t i = 0; i < spec.variables.size(); ++i) {
    bool is_local =
        std::find(spec.local_coords.begin(), spec.local_coords.end(), spec.variables[i]) != spec.local_coords.end();
    (is_local ? local_idx : dep_idx).push_back(i);
  }
  if (local_idx.size() != spec.local_coords.size()) throw input_error("expand: unknown local coordinate name");
  if (dep_idx.size() != spec.defining.size())
    throw input_error("expand: need exactly one defining polynomial per dependent variable");
  const std::size_t n = local_idx.size(), s = dep_idx.size();

  for (auto i : local_idx)
    if (spec.point[i] != 0)
      throw input_error("expand: local coordinate '" + spec.variables[i] + "' does not vanish at the point");

  // Reordered variable list (locals first) for the solver.
  std::vector<std::string> ordered;
  for (auto i : local_idx) ordered.push_back(spec.variables[i]);
  for (auto i : dep_idx) ordered.push_back(spec.variables[i]);

  std::vector<TruncSeries> defining;
  for (const auto& text : spec.defining) defining.push_back(parse_polynomial(text, ordered));

  // Exact membership check of p.
  QVec p_ordered;
  for (auto i : local_idx) p_ordered.push_back(spec.point[i]);
  for (auto i : dep_idx) p_ordered.push_back(spec.point[i]);
  for (std::size_t m = 0; m < defining.size(); ++m) {
    Rat residual = defining[m].eval(p_ordered);
    if (residual != 0)
      throw input_error("expand: point not on variety (defining[" + std::to_string(m) +
                        "] residual = " + rat_str(residual) + ")");
  }

  QVec y0;
  for (auto i : dep_idx) y0.push_back(spec.point[i]);

  ExpandedSections out;
  out.n = n;
  std::vector<TruncSeries> dep_series;
  if (s > 0) dep_series = solve_dependents(defining, y0, n, order);
  for (std::size_t m = 0; m < s; ++m) {
    out.dependents.push_back(spec.variables[dep_idx[m]]);
    out.dependent_series.push_back(dep_series[m]);
  }

  // Substitution arguments per original chart variable.
  std::vector<TruncSeries> args(spec.variables.size());
  for (std::size_t k = 0; k < n; ++k) {
    LatticeVector e(n, 0);
    e[k] = 1;
    args[local_idx[k]] = TruncSeries::monomial(n, e, Rat(1), order, false);
  }
  for (std::size_t m = 0; m < s; ++m) args[dep_idx[m]] = dep_series[m];

  for (const auto& sec : spec.sections) {
    TruncSeries numerator = parse_polynomial(sec.expr, spec.variables);
    out.ids.push_back(sec.id);
    out.series.push_back(series_compose(numerator, args));
  }
  return out;
}

} // namespace okflow
