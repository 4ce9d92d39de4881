#include "okflow/pipeline.hpp"

#include "okflow/errors.hpp"
#include "okflow/flow.hpp"
#include "okflow/svg.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace okflow {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_file(const fs::path& path, const std::string& content, std::vector<std::string>& files) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write '" + path.string() + "'");
  out << content;
  files.push_back(path.string());
}

json rat_json(const Rat& q) { return json::array({rat_num(q).str(), rat_den(q).str()}); }

Rat rat_from_json(const json& j) {
  return Rat(Int(j.at(0).get<std::string>()), Int(j.at(1).get<std::string>()));
}

// u^e with possibly negative integer exponents, u componentwise nonzero.
Rat monomial_eval(const QVec& u, const LatticeVector& e) {
  Rat out = 1;
  for (std::size_t i = 0; i < u.size(); ++i) {
    std::int64_t k = e[i];
    Rat base = k >= 0 ? u[i] : Rat(1) / u[i];
    for (std::int64_t j = 0; j < (k >= 0 ? k : -k); ++j) out *= base;
  }
  return out;
}

} // namespace

PipelineConfig PipelineConfig::from_json(const std::string& text) {
  json j = json::parse(text);
  PipelineConfig cfg;
  cfg.variety_file = j.at("variety").get<std::string>();
  cfg.k_max = j.value("k_max", std::int64_t{2});
  cfg.gamma_bound = j.value("gamma_bound", std::int64_t{10});
  cfg.search_bound = j.value("search_bound", std::int64_t{2});
  cfg.trunc = j.value("trunc", std::int64_t{0});
  cfg.seed = j.value("seed", std::uint64_t{12345});
  cfg.jacobian_samples = j.value("jacobian_samples", std::size_t{100});
  cfg.out_dir = j.value("out", std::string("out"));
  if (j.contains("flow")) {
    const auto& f = j.at("flow");
    cfg.flow.enabled = f.value("enabled", true);
    cfg.flow.trajectories = f.value("trajectories", std::size_t{20});
    cfg.flow.duration = f.value("duration", 0.75);
    cfg.flow.tol = f.value("tol", 1e-8);
    cfg.flow.seed_abs_lo = f.value("seed_abs_lo", 0.3);
    cfg.flow.seed_abs_hi = f.value("seed_abs_hi", 0.7);
    if (f.contains("checks")) cfg.flow.checks = f.at("checks").get<std::vector<std::string>>();
  }
  return cfg;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open pipeline config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::int64_t bk_oracle_curve(const std::vector<std::int64_t>& a, std::size_t trials, Rng& rng) {
  if (a.size() < 2) throw input_error("bk_oracle_curve: need at least two exponents");
  std::vector<std::int64_t> exps = a;
  std::sort(exps.begin(), exps.end());
  exps.erase(std::unique(exps.begin(), exps.end()), exps.end());
  const std::int64_t emin = exps.front();

  std::map<std::int64_t, std::size_t> votes;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    // Generic section sum a_j u^{beta_j}; cleared by u^{-min}. The root count
    // in C* equals the cleared degree exactly when neither end coefficient
    // vanishes; a degenerate draw is retried.
    for (;;) {
      std::map<std::int64_t, Rat> poly;
      for (auto e : exps) poly[e - emin] += rng.next_rat_nonzero(9);
      std::int64_t degree = -1;
      for (const auto& [e, c] : poly)
        if (c != 0) degree = std::max(degree, e);
      if (degree < 0 || poly.begin()->first != 0 || poly.begin()->second == 0) continue;
      bool leading_ok = poly.count(degree) && poly.at(degree) != 0;
      if (!leading_ok) continue;
      ++votes[degree];
      break;
    }
  }
  std::int64_t best = 0;
  std::size_t best_count = 0;
  for (const auto& [deg, count] : votes)
    if (count > best_count) {
      best = deg;
      best_count = count;
    }
  return best;
}

ImmersionCertificate make_immersion_certificate(const DegenerationFamily& fam, std::size_t samples, Rng& rng) {
  ImmersionCertificate cert;
  cert.n = fam.n;
  cert.r = fam.r;
  cert.gamma = fam.gamma;
  cert.betas = fam.betas;
  cert.lead_coeffs = fam.lead_coeffs;
  cert.expected_rank = fam.n + 1;
  for (std::size_t i = 0; i < samples; ++i) {
    QVec pt(fam.n);
    for (auto& x : pt) x = rng.next_rat_nonzero(9);
    JacobianCertificate jc = jacobian_at_zero_fiber(fam, pt);
    cert.chart = jc.chart;
    cert.sample_points.push_back(pt);
    cert.ranks.push_back(jc.rank);
  }
  return cert;
}

void verify_immersion_certificate(const ImmersionCertificate& cert) {
  // Independent of the stored ranks' provenance: at t = 0 only the monomial
  // data matters. The Jacobian has block shape [[A | 0],[* | 1]], so its rank
  // is 1 + rank(A) with A_{ij} = d_j lambda_{ji} u~^{lambda_j - e_i}.
  if (cert.sample_points.size() != cert.ranks.size())
    throw certificate_error("immersion: sample/rank count mismatch");
  const Rat c_chart = cert.lead_coeffs.at(cert.chart);
  for (std::size_t s = 0; s < cert.sample_points.size(); ++s) {
    const QVec& u = cert.sample_points[s];
    QMat a(cert.n, QVec(cert.r - 1, Rat(0)));
    std::size_t col = 0;
    for (std::size_t j = 0; j < cert.r; ++j) {
      if (j == cert.chart) continue;
      LatticeVector lambda = lv_sub(cert.betas[j], cert.betas[cert.chart]);
      Rat d = cert.lead_coeffs[j] / c_chart;
      for (std::size_t i = 0; i < cert.n; ++i) {
        if (lambda[i] == 0) continue;
        LatticeVector shifted = lambda;
        shifted[i] -= 1;
        a[i][col] = d * Rat(lambda[i]) * monomial_eval(u, shifted);
      }
      ++col;
    }
    std::size_t rank = 1 + qmat_rank(a);
    if (rank != cert.ranks[s])
      throw certificate_error("immersion: recomputed rank " + std::to_string(rank) + " != stored rank " +
                              std::to_string(cert.ranks[s]) + " at sample " + std::to_string(s));
    if (rank != cert.expected_rank)
      throw certificate_error("immersion: rank " + std::to_string(rank) + " below expected " +
                              std::to_string(cert.expected_rank) + " at sample " + std::to_string(s));
  }
}

std::string ImmersionCertificate::to_json() const {
  json j;
  j["type"] = "immersion";
  j["n"] = n;
  j["r"] = r;
  j["gamma"] = gamma;
  j["betas"] = betas;
  json coeffs = json::array();
  for (const auto& c : lead_coeffs) coeffs.push_back(rat_json(c));
  j["lead_coeffs"] = coeffs;
  j["chart"] = chart;
  json pts = json::array();
  for (const auto& p : sample_points) {
    json coords = json::array();
    for (const auto& x : p) coords.push_back(rat_json(x));
    pts.push_back(coords);
  }
  j["sample_points"] = pts;
  j["ranks"] = ranks;
  j["expected_rank"] = expected_rank;
  return j.dump(2);
}

ImmersionCertificate ImmersionCertificate::from_json(const std::string& text) {
  json j = json::parse(text);
  ImmersionCertificate cert;
  cert.n = j.at("n").get<std::size_t>();
  cert.r = j.at("r").get<std::size_t>();
  cert.gamma = j.at("gamma").get<LatticeVector>();
  for (const auto& b : j.at("betas")) cert.betas.push_back(b.get<LatticeVector>());
  for (const auto& c : j.at("lead_coeffs")) cert.lead_coeffs.push_back(rat_from_json(c));
  cert.chart = j.at("chart").get<std::size_t>();
  for (const auto& p : j.at("sample_points")) {
    QVec pt;
    for (const auto& x : p) pt.push_back(rat_from_json(x));
    cert.sample_points.push_back(pt);
  }
  cert.ranks = j.at("ranks").get<std::vector<std::size_t>>();
  cert.expected_rank = j.at("expected_rank").get<std::size_t>();
  return cert;
}

std::optional<std::string> verify_certificate_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return "cannot open certificate file '" + path + "'";
  std::stringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const std::exception& e) {
    return std::string("malformed JSON: ") + e.what();
  }
  const std::string type = j.value("type", "");
  try {
    if (type == "simplex") {
      SimplexCertificate cert = SimplexCertificate::from_json(buf.str());
      std::string why;
      if (!verify_simplex_certificate(cert, &why)) return "simplex certificate invalid: " + why;
      return std::nullopt;
    }
    if (type == "packing") {
      verify_packing_certificate(PackingCertificate::from_json(buf.str()));
      return std::nullopt;
    }
    if (type == "immersion") {
      verify_immersion_certificate(ImmersionCertificate::from_json(buf.str()));
      return std::nullopt;
    }
    if (type == "gamma") {
      LatticeVector gamma = j.at("gamma").get<LatticeVector>();
      std::vector<SupportWithBeta> supports;
      for (const auto& s : j.at("supports")) {
        SupportWithBeta swb;
        swb.beta = s.at("beta").get<LatticeVector>();
        for (const auto& a : s.at("support")) swb.support.push_back(a.get<LatticeVector>());
        supports.push_back(swb);
      }
      for (const auto& s : supports) {
        std::int64_t gb = lv_dot(gamma, s.beta);
        for (const auto& alpha : s.support)
          if (alpha != s.beta && lv_dot(gamma, alpha) <= gb)
            return "gamma certificate invalid: weight does not separate a support point";
      }
      return std::nullopt;
    }
  } catch (const std::exception& e) {
    return std::string("certificate verification failed: ") + e.what();
  }
  return "unknown certificate type '" + type + "'";
}

namespace {

json polytope_report(const QPolytope& p) {
  json j;
  j["vertices"] = json::parse(p.to_json()).at("vertices");
  j["dim"] = p.ambient_dim();
  j["intrinsic_dim"] = p.dim();
  if (p.full_dimensional()) {
    j["normalized_volume"] = rat_json(p.normalized_volume());
    j["euclidean_volume"] = rat_json(p.euclidean_volume());
  }
  return j;
}

std::string gamma_certificate_json(const LatticeVector& gamma, std::int64_t order,
                                   const std::vector<SupportWithBeta>& supports) {
  json j;
  j["type"] = "gamma";
  j["gamma"] = gamma;
  j["verified_on_trunc"] = order;
  j["assumes_full_support"] = true;
  json sup = json::array();
  for (const auto& s : supports) {
    json sj;
    sj["beta"] = s.beta;
    json pts = json::array();
    for (const auto& a : s.support) pts.push_back(a);
    sj["support"] = pts;
    sup.push_back(sj);
  }
  j["supports"] = sup;
  return j.dump(2);
}

std::pair<double, double> project2(const FlowState& st) { return {st.t.real(), st.t.imag()}; }

} // namespace

PipelineOutcome run_pipeline(const PipelineConfig& cfg) {
  PipelineOutcome out;
  fs::create_directories(cfg.out_dir);
  const fs::path dir(cfg.out_dir);
  json report;
  report["config"] = {{"variety", cfg.variety_file}, {"k_max", cfg.k_max},      {"gamma_bound", cfg.gamma_bound},
                      {"search_bound", cfg.search_bound}, {"trunc", cfg.trunc}, {"seed", cfg.seed},
                      {"jacobian_samples", cfg.jacobian_samples}};
  if (cfg.flow.enabled)
    report["config"]["flow"] = {{"trajectories", cfg.flow.trajectories}, {"duration", cfg.flow.duration},
                                {"tol", cfg.flow.tol},                   {"seed_abs_lo", cfg.flow.seed_abs_lo},
                                {"seed_abs_hi", cfg.flow.seed_abs_hi},   {"checks", cfg.flow.checks}};
  std::ostringstream summary;

  auto stage = [&](const char* name, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      throw input_error(std::string("pipeline stage '") + name + "' failed: " + e.what());
    }
  };

  // expand
  VarietySpec spec = VarietySpec::load(cfg.variety_file);
  ExpandedSections expanded;
  stage("expand", [&] { expanded = expand_sections(spec, cfg.trunc); });
  report["variety"] = spec.name;
  report["n"] = expanded.n;
  {
    json secs = json::array();
    for (std::size_t i = 0; i < expanded.ids.size(); ++i) {
      json s;
      s["id"] = expanded.ids[i];
      s["series"] = json::parse(expanded.series[i].to_json());
      secs.push_back(s);
    }
    json bundle;
    bundle["n"] = expanded.n;
    bundle["sections"] = secs;
    write_file(dir / "sections.json", bundle.dump(2), out.files_written);
  }
  summary << "variety: " << spec.name << " (n = " << expanded.n << ", r = " << expanded.ids.size() << ")\n";

  // triangularize
  ValuedBasis basis;
  stage("triangularize", [&] { basis = triangularize(expanded.series, expanded.ids); });
  {
    json jb;
    json secs = json::array();
    for (const auto& s : basis.sections) {
      json sj;
      sj["id"] = s.id;
      sj["beta"] = s.beta;
      sj["lead_coeff"] = rat_json(s.lead_coeff);
      sj["series"] = json::parse(s.series.to_json());
      secs.push_back(sj);
    }
    jb["sections"] = secs;
    jb["A"] = basis.value_set;
    write_file(dir / "basis.json", jb.dump(2), out.files_written);
    report["A"] = basis.value_set;
    json ids = json::array();
    for (const auto& s : basis.sections) {
      json e;
      e["id"] = s.id;
      e["beta"] = s.beta;
      e["lead_coeff"] = rat_json(s.lead_coeff);
      ids.push_back(e);
    }
    report["sections"] = ids;
  }
  bool lattice_ok = check_lattice_condition(basis);
  report["lattice_condition"] = lattice_ok;
  summary << "A = {";
  for (std::size_t i = 0; i < basis.value_set.size(); ++i) {
    if (i) summary << ", ";
    summary << "(";
    for (std::size_t c = 0; c < basis.value_set[i].size(); ++c)
      summary << (c ? "," : "") << basis.value_set[i][c];
    summary << ")";
  }
  summary << "}, differences generate Z^n: " << (lattice_ok ? "yes" : "no") << "\n";

  // gamma
  LatticeVector gamma;
  std::vector<SupportWithBeta> supports;
  stage("gamma", [&] {
    for (const auto& s : basis.sections) {
      SupportWithBeta swb;
      swb.beta = s.beta;
      for (const auto& [e, c] : s.series.terms()) swb.support.push_back(e);
      supports.push_back(std::move(swb));
    }
    gamma = choose_gamma(supports, cfg.gamma_bound);
  });
  std::int64_t order = basis.sections[0].series.trunc();
  write_file(dir / "gamma.cert.json", gamma_certificate_json(gamma, order, supports), out.files_written);
  report["gamma"] = gamma;

  // family
  DegenerationFamily fam;
  stage("degenerate", [&] { fam = build_family(basis.sections, gamma); });
  write_file(dir / "family.json", fam.to_json(), out.files_written);

  // immersion certificate
  Rng rng(cfg.seed);
  ImmersionCertificate icert;
  stage("jacobian-check", [&] {
    icert = make_immersion_certificate(fam, cfg.jacobian_samples, rng);
    verify_immersion_certificate(icert);
  });
  write_file(dir / "immersion.cert.json", icert.to_json(), out.files_written);
  report["immersion"] = {{"chart", icert.chart},
                         {"samples", icert.sample_points.size()},
                         {"expected_rank", icert.expected_rank},
                         {"all_full_rank", true}};
  summary << "immersion: rank " << icert.expected_rank << " at " << icert.sample_points.size()
          << " random torus points (chart " << icert.chart << ")\n";

  // Delta_k
  std::vector<QPolytope> deltas;
  json delta_report = json::array();
  stage("nobody", [&] {
    for (std::int64_t k = 1; k <= cfg.k_max; ++k) {
      PowerValueSet pvs = power_value_set(basis, k);
      QPolytope dk = delta_k(pvs.values, k);
      json jk;
      jk["k"] = k;
      jk["A_k"] = pvs.values;
      jk["dependents_dropped_at_order"] = pvs.dependents_dropped;
      jk["polytope"] = polytope_report(dk);
      delta_report.push_back(jk);
      write_file(dir / ("nobody_k" + std::to_string(k) + ".json"), dk.to_json(), out.files_written);
      deltas.push_back(std::move(dk));
    }
  });
  report["delta_k"] = delta_report;
  for (std::size_t i = 0; i < deltas.size(); ++i)
    summary << "Delta_" << (i + 1) << ": " << deltas[i].vertices().size() << " vertices"
            << (deltas[i].full_dimensional()
                    ? ", normalized volume " + rat_str(deltas[i].normalized_volume())
                    : std::string(", dim ") + std::to_string(deltas[i].dim()))
            << "\n";

  // volume gaps between successive approximants (monotone under k | k').
  json gaps = json::array();
  stage("volume-gap", [&] {
    for (std::size_t i = 0; i + 1 < deltas.size(); ++i) {
      if (!deltas[i].full_dimensional() || !deltas[i + 1].full_dimensional()) continue;
      Rat gap = volume_gap(deltas[i + 1], deltas[i]);
      json g;
      g["outer_k"] = i + 2;
      g["inner_k"] = i + 1;
      g["gap"] = rat_json(gap);
      gaps.push_back(g);
    }
  });
  report["volume_gaps"] = gaps;

  // Bernstein-Kushnirenko cross-check for curves.
  if (expanded.n == 1 && deltas.front().full_dimensional()) {
    stage("bk-check", [&] {
      std::vector<std::int64_t> a;
      for (const auto& v : basis.value_set) a.push_back(v[0]);
      std::int64_t degree = bk_oracle_curve(a, 11, rng);
      Rat nvol = hull_of_lattice_points(basis.value_set).normalized_volume();
      bool match = Rat(degree) == nvol;
      report["bk"] = {{"degree", degree}, {"normalized_volume", rat_json(nvol)}, {"match", match}};
      summary << "BK check: oracle degree " << degree << " vs normalized volume " << rat_str(nvol)
              << (match ? " (match)" : " (MISMATCH)") << "\n";
      if (!match) throw certificate_error("BK oracle disagrees with the normalized volume");
    });
  }

  // Gromov width certificate on the last approximant.
  if (expanded.n <= 3 && deltas.back().full_dimensional()) {
    stage("gromov", [&] {
      SimplexCertificate cert = search_largest_simplex(deltas.back(), cfg.search_bound);
      write_file(dir / "gromov.cert.json", cert.to_json(), out.files_written);
      report["gromov"] = {{"size", rat_json(cert.size)},
                          {"open_supremum", cert.open_supremum},
                          {"file", "gromov.cert.json"}};
      summary << "gromov: size-" << rat_str(cert.size) << " simplex certificate"
              << (cert.open_supremum ? " (open supremum)" : "") << "\n";
    });
  }

  // Packing when an approximant realizes the simplicial shape with integer d.
  stage("pack", [&] {
    for (std::size_t i = deltas.size(); i-- > 0;) {
      const QPolytope& dk = deltas[i];
      if (!dk.full_dimensional()) continue;
      Rat nvol = dk.normalized_volume();
      if (rat_den(nvol) != 1 || nvol < 1) continue;
      std::int64_t d = rat_num(nvol).convert_to<std::int64_t>();
      if (!(dk == simplicial_nobody(expanded.n, Rat(d)))) continue;
      PackingCertificate pack = packing_subdivision(expanded.n, d);
      write_file(dir / "packing.cert.json", pack.to_json(), out.files_written);
      report["packing"] = {{"d", d}, {"pieces", pack.pieces.size()}, {"from_k", i + 1}, {"file", "packing.cert.json"}};
      summary << "packing: " << d << " unimodular pieces tile Delta_" << (i + 1) << "\n";
      return;
    }
    report["packing"] = nullptr;
    summary << "packing: simplicial shape not detected, skipped\n";
  });

  // Moment-map samples: CSV always, scatter SVG for n <= 2.
  stage("moment-sample", [&] {
    std::vector<std::complex<double>> c;
    std::vector<LatticeVector> a;
    for (std::size_t j = 0; j < fam.r; ++j) {
      a.push_back(fam.betas[j]);
      c.push_back(rat_to_double(fam.lead_coeffs[j]));
    }
    std::ostringstream csv;
    csv.setf(std::ios::scientific);
    csv.precision(12);
    for (std::size_t i = 0; i < expanded.n; ++i) csv << (i ? "," : "") << "mu_" << (i + 1);
    csv << "\n";
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < 2000; ++i) {
      std::vector<std::complex<double>> u(expanded.n);
      for (auto& x : u) x = rng.next_log_uniform(1e-3, 1e3) * rng.next_phase();
      auto mu = moment_map(a, c, u);
      for (std::size_t k = 0; k < mu.size(); ++k) csv << (k ? "," : "") << mu[k];
      csv << "\n";
      pts.emplace_back(mu[0], expanded.n >= 2 ? mu[1] : 0.0);
    }
    write_file(dir / "moment_samples.csv", csv.str(), out.files_written);
    if (expanded.n > 2) return;
    SvgPlot plot;
    std::vector<std::pair<double, double>> hull_pts;
    QPolytope hull = hull_of_lattice_points(fam.value_set);
    for (const auto& v : hull.vertices())
      hull_pts.emplace_back(rat_to_double(v[0]), v.size() > 1 ? rat_to_double(v[1]) : 0.0);
    // Outline order for the plot: angle about the centroid.
    double cx = 0, cy = 0;
    for (auto& [x, y] : hull_pts) {
      cx += x / hull_pts.size();
      cy += y / hull_pts.size();
    }
    std::sort(hull_pts.begin(), hull_pts.end(), [&](const auto& p, const auto& q) {
      return std::atan2(p.second - cy, p.first - cx) < std::atan2(q.second - cy, q.first - cx);
    });
    plot.add_polygon(hull_pts, "black");
    plot.add_points(pts, "steelblue");
    write_file(dir / "moment.svg", plot.render(), out.files_written);
  });

  // Flow batch.
  if (cfg.flow.enabled) {
    stage("flow", [&] {
      auto wants = [&](const char* name) {
        return std::find(cfg.flow.checks.begin(), cfg.flow.checks.end(), name) != cfg.flow.checks.end();
      };
      json flow_report = json::array();
      fs::create_directories(dir / "flow");
      SvgPlot tplot;
      for (std::size_t traj_i = 0; traj_i < cfg.flow.trajectories; ++traj_i) {
        FlowState s0;
        s0.t = 1.0;
        s0.u_tilde.resize(fam.n);
        for (auto& x : s0.u_tilde)
          x = rng.next_log_uniform(cfg.flow.seed_abs_lo, cfg.flow.seed_abs_hi) * rng.next_phase();

        AreaTransport at;
        if (wants("area")) {
          Eigen::VectorXd v1 = Eigen::VectorXd::Zero(s0.real_dim());
          Eigen::VectorXd v2 = Eigen::VectorXd::Zero(s0.real_dim());
          v1[0] = 1.0;
          v2[1] = 1.0;
          at = transport_area_check(fam, s0, v1, v2, cfg.flow.duration, cfg.flow.tol);
        } else {
          at.base = integrate_flow(fam, s0, cfg.flow.duration, cfg.flow.tol);
        }
        const Trajectory& tr = at.base;
        if (tr.status != Trajectory::Status::ok)
          throw input_error("trajectory " + std::to_string(traj_i) + " failed: " + tr.message);
        if (wants("re_rate") &&
            (tr.re_rate_min < -1.0 - 10 * cfg.flow.tol || tr.re_rate_max > -1.0 + 10 * cfg.flow.tol))
          throw input_error("trajectory " + std::to_string(traj_i) + " violates the unit Re-rate check");
        if (wants("im_drift") && tr.im_drift_max > 10 * cfg.flow.tol)
          throw input_error("trajectory " + std::to_string(traj_i) + " violates the Im-invariance check");
        if (wants("area")) {
          double rel = std::abs(at.area_after - at.area_before) / std::max(1e-300, std::abs(at.area_before));
          if (rel > 1e-3)
            throw input_error("trajectory " + std::to_string(traj_i) + " violates the area-preservation check");
        }

        std::ostringstream csv;
        csv.setf(std::ios::scientific);
        csv.precision(12);
        csv << "s,re_t,im_t";
        for (std::size_t i = 0; i < fam.n; ++i) csv << ",re_u" << (i + 1) << ",im_u" << (i + 1);
        csv << ",area_before,area_after\n";
        std::vector<std::pair<double, double>> path;
        for (std::size_t row = 0; row < tr.states.size(); ++row) {
          const FlowState& st = tr.states[row];
          csv << tr.s[row] << "," << st.t.real() << "," << st.t.imag();
          for (std::size_t i = 0; i < fam.n; ++i)
            csv << "," << st.u_tilde[i].real() << "," << st.u_tilde[i].imag();
          csv << "," << at.area_before << "," << at.area_after << "\n";
          path.push_back(project2(st));
        }
        write_file(dir / "flow" / ("traj_" + std::to_string(traj_i) + ".csv"), csv.str(), out.files_written);
        tplot.add_path(path, "firebrick");

        json tj;
        tj["index"] = traj_i;
        tj["status"] = tr.status == Trajectory::Status::ok ? "ok" : tr.message;
        tj["final_re_t"] = tr.final_state().t.real();
        tj["final_im_t"] = tr.final_state().t.imag();
        tj["re_rate_min"] = tr.re_rate_min;
        tj["re_rate_max"] = tr.re_rate_max;
        tj["im_drift_max"] = tr.im_drift_max;
        if (wants("area")) {
          tj["area_before"] = at.area_before;
          tj["area_after"] = at.area_after;
          tj["area_rel_drift"] = std::abs(at.area_after - at.area_before) / std::max(1e-300, std::abs(at.area_before));
        }
        tj["steps"] = tr.steps_accepted;
        tj["chart_switches"] = tr.chart_switches;
        flow_report.push_back(tj);
      }
      write_file(dir / "flow" / "t_plane.svg", tplot.render(), out.files_written);
      report["flow"] = flow_report;
      summary << "flow: " << cfg.flow.trajectories << " trajectories, duration " << cfg.flow.duration << "\n";
    });
  }

  report["files"] = out.files_written;
  out.report_json = report.dump(2) + "\n";
  out.summary_text = summary.str();
  std::vector<std::string> tail;
  write_file(dir / "report.json", out.report_json, tail);
  write_file(dir / "summary.txt", out.summary_text, tail);
  out.files_written.insert(out.files_written.end(), tail.begin(), tail.end());
  return out;
}

} // namespace okflow
