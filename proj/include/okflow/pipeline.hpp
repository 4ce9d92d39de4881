#ifndef OKFLOW_PIPELINE_HPP
#define OKFLOW_PIPELINE_HPP

#include "okflow/degeneration.hpp"
#include "okflow/gromov.hpp"
#include "okflow/polytope.hpp"
#include "okflow/rng.hpp"
#include "okflow/valuation.hpp"
#include "okflow/variety.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace okflow {

struct FlowSettings {
  bool enabled = false;
  std::size_t trajectories = 20;
  double duration = 0.75;
  double tol = 1e-8;
  double seed_abs_lo = 0.3; // starting |u| annulus on the t = 1 fiber
  double seed_abs_hi = 0.7;
  std::vector<std::string> checks{"re_rate", "im_drift", "area"};
};

struct PipelineConfig {
  std::string variety_file;
  std::int64_t k_max = 2;
  std::int64_t gamma_bound = 10;
  std::int64_t search_bound = 2;
  std::int64_t trunc = 0; // 0: use the variety file's order
  std::uint64_t seed = 12345;
  std::size_t jacobian_samples = 100;
  std::string out_dir = "out";
  FlowSettings flow;

  static PipelineConfig from_json(const std::string& text);
  static PipelineConfig load(const std::string& path);
};

struct PipelineOutcome {
  std::string report_json;   // byte-identical across reruns with the same config
  std::string summary_text;
  std::vector<std::string> files_written;
};

// expand -> triangularize -> gamma -> family -> immersion certificate ->
// Delta_k -> BK cross-check (n = 1) -> simplex search -> packing when the
// simplicial shape is detected -> optional flow batch. Every certificate is
// re-verifiable from its own file.
PipelineOutcome run_pipeline(const PipelineConfig& cfg);

// Independent n = 1 degree oracle: the degree of a generic hyperplane section
// of the monomial curve u -> (a_j u^{beta_j}), counted through the cleared
// polynomial with a nonvanishing constant term. Majority vote over trials.
std::int64_t bk_oracle_curve(const std::vector<std::int64_t>& a, std::size_t trials, Rng& rng);

// Re-verifies a certificate file in isolation; returns a human-readable
// failure description or nullopt on success.
std::optional<std::string> verify_certificate_file(const std::string& path);

// Immersion certificate: self-contained monomial data plus sampled ranks.
struct ImmersionCertificate {
  std::size_t n = 0, r = 0;
  LatticeVector gamma;
  std::vector<LatticeVector> betas;
  std::vector<Rat> lead_coeffs;
  std::size_t chart = 0;
  std::vector<QVec> sample_points;
  std::vector<std::size_t> ranks;
  std::size_t expected_rank = 0;

  std::string to_json() const;
  static ImmersionCertificate from_json(const std::string& text);
};

ImmersionCertificate make_immersion_certificate(const DegenerationFamily& fam, std::size_t samples, Rng& rng);
void verify_immersion_certificate(const ImmersionCertificate& cert); // throws certificate_error

} // namespace okflow

#endif
