#include "okflow/degeneration.hpp"
#include "okflow/errors.hpp"
#include "okflow/expr.hpp"
#include "okflow/flow.hpp"
#include "okflow/gromov.hpp"
#include "okflow/pipeline.hpp"
#include "okflow/polytope.hpp"
#include "okflow/svg.hpp"
#include "okflow/valuation.hpp"
#include "okflow/variety.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace okflow;
using nlohmann::json;
namespace fs = std::filesystem;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot write '" + path.string() + "'");
  out << content;
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoll(item));
  return out;
}

std::string beta_str(const LatticeVector& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + ")";
}

int cmd_expand(const std::string& variety, std::int64_t trunc, const std::string& out_path) {
  ExpandedSections ex = expand_sections(VarietySpec::load(variety), trunc);
  json bundle;
  bundle["n"] = ex.n;
  json secs = json::array();
  for (std::size_t i = 0; i < ex.ids.size(); ++i) {
    json s;
    s["id"] = ex.ids[i];
    s["series"] = json::parse(ex.series[i].to_json());
    secs.push_back(s);
  }
  bundle["sections"] = secs;
  json deps = json::array();
  for (std::size_t i = 0; i < ex.dependents.size(); ++i) {
    json d;
    d["variable"] = ex.dependents[i];
    d["series"] = json::parse(ex.dependent_series[i].to_json());
    deps.push_back(d);
  }
  bundle["dependents"] = deps;
  std::string text = bundle.dump(2) + "\n";
  if (!out_path.empty())
    spit(out_path, text);
  else
    std::cout << text;
  return 0;
}

int cmd_valuate(const std::string& variety, std::int64_t trunc) {
  ExpandedSections ex = expand_sections(VarietySpec::load(variety), trunc);
  for (std::size_t i = 0; i < ex.ids.size(); ++i)
    std::cout << ex.ids[i] << "  v = " << beta_str(lex_valuation(ex.series[i])) << "\n";
  return 0;
}

int cmd_basis_reduce(const std::string& variety, std::int64_t trunc, const std::string& out_path) {
  ExpandedSections ex = expand_sections(VarietySpec::load(variety), trunc);
  ValuedBasis basis = triangularize(ex.series, ex.ids);
  json jb;
  json secs = json::array();
  for (const auto& s : basis.sections) {
    json sj;
    sj["id"] = s.id;
    sj["beta"] = s.beta;
    sj["lead_coeff"] = {rat_num(s.lead_coeff).str(), rat_den(s.lead_coeff).str()};
    sj["series"] = json::parse(s.series.to_json());
    secs.push_back(sj);
    std::cout << s.id << "  beta = " << beta_str(s.beta) << "  c = " << rat_str(s.lead_coeff) << "\n";
  }
  jb["sections"] = secs;
  jb["A"] = basis.value_set;
  if (!out_path.empty()) spit(out_path, jb.dump(2) + "\n");
  return 0;
}

DegenerationFamily family_from_variety(const std::string& variety, std::int64_t trunc, bool reduce,
                                       std::int64_t gamma_bound) {
  ExpandedSections ex = expand_sections(VarietySpec::load(variety), trunc);
  std::vector<ValuedSection> sections;
  if (reduce) {
    sections = triangularize(ex.series, ex.ids).sections;
  } else {
    for (std::size_t i = 0; i < ex.ids.size(); ++i) sections.push_back(make_valued_section(ex.ids[i], ex.series[i]));
  }
  std::vector<SupportWithBeta> supports;
  for (const auto& s : sections) {
    SupportWithBeta swb;
    swb.beta = s.beta;
    for (const auto& [e, c] : s.series.terms()) swb.support.push_back(e);
    supports.push_back(std::move(swb));
  }
  LatticeVector gamma = choose_gamma(supports, gamma_bound);
  return build_family(sections, gamma);
}

int cmd_gamma(const std::string& variety, std::int64_t trunc, std::int64_t bound, const std::string& out_path) {
  ExpandedSections ex = expand_sections(VarietySpec::load(variety), trunc);
  ValuedBasis basis = triangularize(ex.series, ex.ids);
  std::vector<SupportWithBeta> supports;
  for (const auto& s : basis.sections) {
    SupportWithBeta swb;
    swb.beta = s.beta;
    for (const auto& [e, c] : s.series.terms()) swb.support.push_back(e);
    supports.push_back(std::move(swb));
  }
  LatticeVector gamma = choose_gamma(supports, bound);
  json j;
  j["type"] = "gamma";
  j["gamma"] = gamma;
  j["verified_on_trunc"] = basis.sections[0].series.trunc();
  j["assumes_full_support"] = true;
  json sup = json::array();
  for (const auto& s : supports) {
    json sj;
    sj["beta"] = s.beta;
    sj["support"] = s.support;
    sup.push_back(sj);
  }
  j["supports"] = sup;
  std::cout << "gamma = " << beta_str(gamma) << "\n";
  if (!out_path.empty()) spit(out_path, j.dump(2) + "\n");
  return 0;
}

int cmd_degenerate(const std::string& variety, std::int64_t trunc, bool no_reduce, std::int64_t gamma_bound,
                   const std::string& out_path) {
  DegenerationFamily fam = family_from_variety(variety, trunc, !no_reduce, gamma_bound);
  for (std::size_t j = 0; j < fam.r; ++j)
    std::cout << fam.ids[j] << "  beta = " << beta_str(fam.betas[j]) << "  c = " << rat_str(fam.lead_coeffs[j])
              << "\n";
  if (!out_path.empty()) spit(out_path, fam.to_json() + "\n");
  return 0;
}

int cmd_jacobian_check(const std::string& family_file, std::size_t count, std::uint64_t seed,
                       const std::string& out_path) {
  DegenerationFamily fam = DegenerationFamily::from_json(slurp(family_file));
  Rng rng(seed);
  ImmersionCertificate cert = make_immersion_certificate(fam, count, rng);
  verify_immersion_certificate(cert);
  std::cout << "rank " << cert.expected_rank << " at " << count << " random torus points (chart " << cert.chart
            << ")\n";
  if (!out_path.empty()) spit(out_path, cert.to_json() + "\n");
  return 0;
}

int cmd_nobody(const std::string& variety, std::int64_t trunc, std::int64_t k, const std::string& out_path) {
  ExpandedSections ex = expand_sections(VarietySpec::load(variety), trunc);
  ValuedBasis basis = triangularize(ex.series, ex.ids);
  PowerValueSet pvs = power_value_set(basis, k);
  QPolytope dk = delta_k(pvs.values, k);
  std::cout << "A_" << k << " has " << pvs.values.size() << " values; Delta_" << k << " has "
            << dk.vertices().size() << " vertices";
  if (dk.full_dimensional()) std::cout << ", normalized volume " << rat_str(dk.normalized_volume());
  std::cout << "\n";
  if (!out_path.empty()) spit(out_path, dk.to_json() + "\n");
  return 0;
}

int cmd_bk_check(const std::string& a_list, std::size_t trials, std::uint64_t seed) {
  std::vector<std::int64_t> a = parse_int_list(a_list);
  Rng rng(seed);
  std::int64_t degree = bk_oracle_curve(a, trials, rng);
  std::vector<LatticeVector> pts;
  for (auto v : a) pts.push_back({v});
  Rat nvol = hull_of_lattice_points(pts).normalized_volume();
  std::cout << "oracle degree = " << degree << ", normalized volume = " << rat_str(nvol) << "\n";
  if (Rat(degree) != nvol) {
    std::cerr << "mismatch\n";
    return 4;
  }
  return 0;
}

int cmd_flow(const std::string& family_file, double duration, double tol, std::size_t count, std::uint64_t seed,
             const std::string& out_dir) {
  DegenerationFamily fam = DegenerationFamily::from_json(slurp(family_file));
  Rng rng(seed);
  fs::create_directories(out_dir);
  SvgPlot tplot;
  for (std::size_t i = 0; i < count; ++i) {
    FlowState s0;
    s0.t = 1.0;
    s0.u_tilde.resize(fam.n);
    for (auto& x : s0.u_tilde) x = rng.next_log_uniform(0.3, 0.7) * rng.next_phase();
    Trajectory tr = integrate_flow(fam, s0, duration, tol);
    std::ostringstream csv;
    csv.setf(std::ios::scientific);
    csv.precision(12);
    csv << "s,re_t,im_t";
    for (std::size_t c = 0; c < fam.n; ++c) csv << ",re_u" << (c + 1) << ",im_u" << (c + 1);
    csv << ",re_rate_min,re_rate_max\n";
    std::vector<std::pair<double, double>> path;
    for (std::size_t row = 0; row < tr.states.size(); ++row) {
      const FlowState& st = tr.states[row];
      csv << tr.s[row] << "," << st.t.real() << "," << st.t.imag();
      for (std::size_t c = 0; c < fam.n; ++c) csv << "," << st.u_tilde[c].real() << "," << st.u_tilde[c].imag();
      csv << "," << tr.re_rate_min << "," << tr.re_rate_max << "\n";
      path.emplace_back(st.t.real(), st.t.imag());
    }
    spit(fs::path(out_dir) / ("traj_" + std::to_string(i) + ".csv"), csv.str());
    tplot.add_path(path, "firebrick");
    std::cout << "trajectory " << i << ": final t = (" << tr.final_state().t.real() << ", "
              << tr.final_state().t.imag() << "), steps " << tr.steps_accepted
              << (tr.status == Trajectory::Status::ok ? "" : (", " + tr.message)) << "\n";
    if (tr.status != Trajectory::Status::ok) return 2;
  }
  spit(fs::path(out_dir) / "t_plane.svg", tplot.render());
  return 0;
}

int cmd_moment_sample(const std::string& a_list, std::size_t count, std::uint64_t seed, const std::string& out_dir) {
  std::vector<std::int64_t> a_ints = parse_int_list(a_list);
  std::vector<LatticeVector> a;
  for (auto v : a_ints) a.push_back({v});
  std::vector<std::complex<double>> c(a.size(), 1.0);
  Rng rng(seed);
  double lo = 1e300, hi = -1e300;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<std::complex<double>> u{rng.next_log_uniform(1e-3, 1e3) * rng.next_phase()};
    double mu = moment_map(a, c, u)[0];
    lo = std::min(lo, mu);
    hi = std::max(hi, mu);
    pts.emplace_back(mu, 0.0);
  }
  auto [amin, amax] = std::minmax_element(a_ints.begin(), a_ints.end());
  std::cout << "samples in (" << lo << ", " << hi << "), conv(A) = (" << *amin << ", " << *amax << ")\n";
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    SvgPlot plot;
    plot.add_polygon({{double(*amin), 0.0}, {double(*amax), 0.0}}, "black");
    plot.add_points(pts, "steelblue");
    spit(fs::path(out_dir) / "moment.svg", plot.render());
  }
  bool inside = lo > double(*amin) && hi < double(*amax);
  return inside ? 0 : 4;
}

int cmd_gromov(const std::string& polytope_file, std::int64_t bound, const std::string& out_path) {
  QPolytope target = QPolytope::from_json(slurp(polytope_file));
  SimplexCertificate cert = search_largest_simplex(target, bound);
  std::cout << "size = " << rat_str(cert.size) << (cert.open_supremum ? " (open supremum)" : "") << "\n";
  if (!out_path.empty()) spit(out_path, cert.to_json() + "\n");
  return 0;
}

int cmd_pack(std::int64_t n, std::int64_t d, const std::string& out_path) {
  PackingCertificate cert = packing_subdivision(static_cast<std::size_t>(n), d);
  std::cout << d << " unimodular pieces tile conv{0, e_1, ..., e_{n-1}, d e_n}\n";
  if (!out_path.empty()) spit(out_path, cert.to_json() + "\n");
  return 0;
}

int cmd_verify_cert(const std::string& path) {
  auto failure = verify_certificate_file(path);
  if (failure) {
    std::cerr << *failure << "\n";
    return 4;
  }
  std::cout << "certificate ok\n";
  return 0;
}

int cmd_pipeline(const std::string& config_file) {
  PipelineOutcome out = run_pipeline(PipelineConfig::load(config_file));
  std::cout << out.summary_text;
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"toric degeneration / Newton-Okounkov certificate kernel"};
  app.require_subcommand(1);

  std::string variety, family_file, polytope_file, cert_file, config_file, out_path, a_list;
  std::int64_t trunc = 0, k = 1, bound = 2, nn = 2, dd = 1;
  std::size_t count = 100;
  std::uint64_t seed = 12345;
  double tol = 1e-8, duration = 0.75;
  bool no_reduce = false;

  auto* expand = app.add_subcommand("expand", "expand sections as exact power series");
  expand->add_option("variety", variety)->required();
  expand->add_option("--trunc", trunc);
  expand->add_option("--out", out_path);

  auto* valuate = app.add_subcommand("valuate", "valuation values of the expanded sections");
  valuate->add_option("variety", variety)->required();
  valuate->add_option("--trunc", trunc);

  auto* reduce = app.add_subcommand("basis-reduce", "triangularize to pairwise-distinct valuations");
  reduce->add_option("variety", variety)->required();
  reduce->add_option("--trunc", trunc);
  reduce->add_option("--out", out_path);

  auto* gammac = app.add_subcommand("gamma", "choose a separating weight vector");
  gammac->add_option("variety", variety)->required();
  gammac->add_option("--trunc", trunc);
  gammac->add_option("--bound", bound);
  gammac->add_option("--out", out_path);

  auto* degen = app.add_subcommand("degenerate", "build the degenerated family");
  degen->add_option("variety", variety)->required();
  degen->add_option("--trunc", trunc);
  degen->add_option("--bound", bound);
  degen->add_flag("--no-reduce", no_reduce, "keep the raw section basis");
  degen->add_option("--out", out_path);

  auto* jac = app.add_subcommand("jacobian-check", "immersion certificate at random torus points");
  jac->add_option("family", family_file)->required();
  jac->add_option("--count", count);
  jac->add_option("--seed", seed);
  jac->add_option("--out", out_path);

  auto* nobody = app.add_subcommand("nobody", "Newton-Okounkov approximant Delta_k");
  nobody->add_option("variety", variety)->required();
  nobody->add_option("--k", k);
  nobody->add_option("--trunc", trunc);
  nobody->add_option("--out", out_path);

  auto* bk = app.add_subcommand("bk-check", "degree/volume oracle for curves");
  bk->add_option("--a", a_list, "comma-separated exponents")->required();
  bk->add_option("--trials", count);
  bk->add_option("--seed", seed);

  auto* flow = app.add_subcommand("flow", "gradient-Hamiltonian flow batch");
  flow->add_option("family", family_file)->required();
  flow->add_option("--duration", duration);
  flow->add_option("--tol", tol);
  flow->add_option("--count", count);
  flow->add_option("--seed", seed);
  flow->add_option("--out", out_path);

  auto* moment = app.add_subcommand("moment-sample", "toric moment map samples");
  moment->add_option("--a", a_list)->required();
  moment->add_option("--count", count);
  moment->add_option("--seed", seed);
  moment->add_option("--out", out_path);

  auto* gromov = app.add_subcommand("gromov", "largest-simplex certificate search");
  gromov->add_option("polytope", polytope_file)->required();
  gromov->add_option("--bound", bound);
  gromov->add_option("--out", out_path);

  auto* pack = app.add_subcommand("pack", "full-packing subdivision certificate");
  pack->add_option("--n", nn)->required();
  pack->add_option("--d", dd)->required();
  pack->add_option("--out", out_path);

  auto* verify = app.add_subcommand("verify-cert", "re-verify a certificate file in isolation");
  verify->add_option("certificate", cert_file)->required();

  auto* pipe = app.add_subcommand("pipeline", "run the full pipeline from a config file");
  pipe->add_option("config", config_file)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (expand->parsed()) return cmd_expand(variety, trunc, out_path);
    if (valuate->parsed()) return cmd_valuate(variety, trunc);
    if (reduce->parsed()) return cmd_basis_reduce(variety, trunc, out_path);
    if (gammac->parsed()) return cmd_gamma(variety, trunc, bound, out_path);
    if (degen->parsed()) return cmd_degenerate(variety, trunc, no_reduce, bound, out_path);
    if (jac->parsed()) return cmd_jacobian_check(family_file, count, seed, out_path);
    if (nobody->parsed()) return cmd_nobody(variety, trunc, k, out_path);
    if (bk->parsed()) return cmd_bk_check(a_list, count, seed);
    if (flow->parsed()) return cmd_flow(family_file, duration, tol, count, seed, out_path.empty() ? "flow" : out_path);
    if (moment->parsed()) return cmd_moment_sample(a_list, count, seed, out_path);
    if (gromov->parsed()) return cmd_gromov(polytope_file, bound, out_path);
    if (pack->parsed()) return cmd_pack(nn, dd, out_path);
    if (verify->parsed()) return cmd_verify_cert(cert_file);
    if (pipe->parsed()) return cmd_pipeline(config_file);
  } catch (const truncation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const certificate_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
