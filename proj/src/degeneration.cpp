#include "okflow/degeneration.hpp"

#include "okflow/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace okflow {

DegenerationFamily build_family(const std::vector<ValuedSection>& sections, const LatticeVector& gamma) {
  if (sections.empty()) throw input_error("build_family: no sections");
  const std::size_t n = sections[0].series.arity();
  if (gamma.size() != n) throw input_error("build_family: gamma arity mismatch");

  DegenerationFamily fam;
  fam.n = n;
  fam.r = sections.size();
  fam.gamma = gamma;

  for (const auto& s : sections) {
    if (s.series.arity() != n) throw input_error("build_family: section arity mismatch");
    TruncSeries tilde = substitute_weighted(s.series, gamma, s.beta);

    // Constant-t term must be exactly the single monomial c_j u~^{beta_j}.
    for (const auto& [e, c] : tilde.terms()) {
      if (e[n] != 0) continue;
      LatticeVector head(e.begin(), e.end() - 1);
      if (head != s.beta)
        throw input_error("build_family: gamma not separating at this truncation (section '" + s.id + "')");
    }
    LatticeVector beta_ext(n + 1, 0);
    std::copy(s.beta.begin(), s.beta.end(), beta_ext.begin());
    if (tilde.coeff(beta_ext) != s.lead_coeff)
      throw input_error("build_family: leading coefficient mismatch (section '" + s.id + "')");

    fam.ids.push_back(s.id);
    fam.sections_tilde.push_back(std::move(tilde));
    fam.sections_orig.push_back(s.series);
    fam.betas.push_back(s.beta);
    fam.lead_coeffs.push_back(s.lead_coeff);
  }

  fam.value_set = fam.betas;
  std::sort(fam.value_set.begin(), fam.value_set.end(), lex_less);
  fam.value_set.erase(std::unique(fam.value_set.begin(), fam.value_set.end()), fam.value_set.end());
  if (!differences_generate_lattice(fam.value_set))
    throw input_error("build_family: special fiber torus not full: differences do not generate Z^n");
  return fam;
}

namespace {

// Chart index: lex-smallest beta, last such section on ties.
std::size_t default_chart(const DegenerationFamily& fam) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < fam.r; ++j)
    if (!lex_less(fam.betas[best], fam.betas[j])) best = j;
  return best;
}

} // namespace

JacobianCertificate jacobian_at_zero_fiber(const DegenerationFamily& fam, const QVec& u_tilde) {
  if (u_tilde.size() != fam.n) throw input_error("jacobian_at_zero_fiber: point arity mismatch");
  for (const auto& x : u_tilde)
    if (x == 0) throw input_error("jacobian_at_zero_fiber: point has a zero coordinate");

  const std::size_t m = fam.n + 1;
  QVec point(m, Rat(0));
  std::copy(u_tilde.begin(), u_tilde.end(), point.begin());

  // Values and partials of every section at (u~, 0).
  QVec val(fam.r);
  QMat dval(m, QVec(fam.r));
  for (std::size_t j = 0; j < fam.r; ++j) {
    val[j] = fam.sections_tilde[j].eval(point);
    for (std::size_t i = 0; i < m; ++i) dval[i][j] = fam.sections_tilde[j].derivative(i).eval(point);
  }

  JacobianCertificate cert;
  cert.chart = default_chart(fam);
  const Rat& h = val[cert.chart];
  if (h == 0) throw input_error("jacobian_at_zero_fiber: chart section vanishes at the point");

  // Quotient rule for g_j = f~_j / f~_chart, then the t coordinate itself.
  cert.matrix.assign(m, QVec(fam.r, Rat(0)));
  std::size_t col = 0;
  for (std::size_t j = 0; j < fam.r; ++j) {
    if (j == cert.chart) continue;
    for (std::size_t i = 0; i < m; ++i)
      cert.matrix[i][col] = (dval[i][j] * h - val[j] * dval[i][cert.chart]) / (h * h);
    ++col;
  }
  cert.matrix[m - 1][fam.r - 1] = 1; // d t / d t
  cert.rank = qmat_rank(cert.matrix);
  return cert;
}

EmbeddedPoint evaluate_embedding(const DegenerationFamily& fam, const std::vector<std::complex<double>>& u_tilde,
                                 std::complex<double> t) {
  if (u_tilde.size() != fam.n) throw input_error("evaluate_embedding: point arity mismatch");
  std::vector<std::complex<double>> point(u_tilde);
  point.push_back(t);

  EmbeddedPoint out;
  out.t = t;
  double norm2 = 0.0;
  for (const auto& s : fam.sections_tilde) {
    std::complex<double> z = s.eval(point);
    norm2 += std::norm(z);
    out.homogeneous.push_back(z);
  }
  if (!(norm2 > 1e-300))
    throw input_error("evaluate_embedding: indeterminate point (increase truncation or move u_tilde)");
  double inv = 1.0 / std::sqrt(norm2);
  for (auto& z : out.homogeneous) z *= inv;
  return out;
}

std::string DegenerationFamily::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["r"] = r;
  j["gamma"] = gamma;
  j["ids"] = ids;
  nlohmann::json secs = nlohmann::json::array();
  for (const auto& s : sections_tilde) secs.push_back(nlohmann::json::parse(s.to_json()));
  j["sections_tilde"] = secs;
  nlohmann::json orig = nlohmann::json::array();
  for (const auto& s : sections_orig) orig.push_back(nlohmann::json::parse(s.to_json()));
  j["sections"] = orig;
  j["betas"] = betas;
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& c : lead_coeffs) coeffs.push_back({rat_num(c).str(), rat_den(c).str()});
  j["lead_coeffs"] = coeffs;
  return j.dump(2);
}

DegenerationFamily DegenerationFamily::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  DegenerationFamily fam;
  fam.n = j.at("n").get<std::size_t>();
  fam.r = j.at("r").get<std::size_t>();
  fam.gamma = j.at("gamma").get<LatticeVector>();
  fam.ids = j.at("ids").get<std::vector<std::string>>();
  for (const auto& s : j.at("sections_tilde")) fam.sections_tilde.push_back(TruncSeries::from_json(s.dump()));
  for (const auto& s : j.at("sections")) fam.sections_orig.push_back(TruncSeries::from_json(s.dump()));
  for (const auto& b : j.at("betas")) fam.betas.push_back(b.get<LatticeVector>());
  for (const auto& c : j.at("lead_coeffs"))
    fam.lead_coeffs.emplace_back(Int(c.at(0).get<std::string>()), Int(c.at(1).get<std::string>()));
  fam.value_set = fam.betas;
  std::sort(fam.value_set.begin(), fam.value_set.end(), lex_less);
  fam.value_set.erase(std::unique(fam.value_set.begin(), fam.value_set.end()), fam.value_set.end());
  return fam;
}

} // namespace okflow
