#ifndef OKFLOW_FLOW_HPP
#define OKFLOW_FLOW_HPP

#include "okflow/degeneration.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace okflow {

// A point of the family in the special chart (u~_1..u~_n, t). Real packing
// for tangent vectors and matrices: (Re u~_1, Im u~_1, ..., Re t, Im t).
struct FlowState {
  std::vector<std::complex<double>> u_tilde;
  std::complex<double> t;

  std::size_t real_dim() const { return 2 * (u_tilde.size() + 1); }
  Eigen::VectorXd to_real() const;
  static FlowState from_real(const Eigen::VectorXd& x);
};

// Pullback of the product Fubini-Study x standard form under the family
// embedding, sampled at one point, in the real coordinates of the special
// chart. Convention: omega_FS = (i/2) ddbar log |Z|^2.
struct KahlerSample {
  FlowState point;
  Eigen::MatrixXd metric;
  Eigen::MatrixXd omega;
  double compat_residual = 0.0; // |omega - J^T metric|_inf relative
};

KahlerSample pullback_kahler(const DegenerationFamily& fam, const FlowState& s);

// Gradient-Hamiltonian vector field -grad(Re t)/|grad(Re t)|^2 at s, as a
// real tangent vector in special-chart coordinates. Its Re t component is -1
// by construction.
Eigen::VectorXd grad_ham_field(const DegenerationFamily& fam, const FlowState& s);

struct Trajectory {
  enum class Status { ok, step_underflow, metric_degenerate, handover_mismatch };
  Status status = Status::ok;
  std::string message;

  std::vector<double> s;          // flow parameter at accepted steps
  std::vector<FlowState> states;  // special-chart coordinates
  double re_rate_min = 0.0;       // d(Re t)/ds over accepted steps
  double re_rate_max = 0.0;
  double im_drift_max = 0.0;
  double handover_max_mismatch = 0.0;
  std::size_t steps_accepted = 0;
  std::size_t steps_rejected = 0;
  std::size_t chart_switches = 0;

  const FlowState& final_state() const { return states.back(); }
};

// Flows for |duration| in the -Re t direction (duration > 0) or the reversed
// field (duration < 0), with an adaptive embedded 4/5 pair at tolerance tol.
// Integration runs in the trivial chart (u, t) for |t| > 0.5 and in the
// special chart below, with a handover agreement check in between.
Trajectory integrate_flow(const DegenerationFamily& fam, const FlowState& s0, double duration, double tol);

struct AreaTransport {
  double area_before = 0.0;
  double area_after = 0.0;
  Trajectory base;
};

// Transports a fiber-tangent frame by symmetric finite differences of offset
// trajectories and reports the omega-areas of the parallelogram before and
// after. Frame vectors must have zero dt components.
AreaTransport transport_area_check(const DegenerationFamily& fam, const FlowState& s0, const Eigen::VectorXd& v1,
                                   const Eigen::VectorXd& v2, double duration, double tol,
                                   double offset_scale = 1e-5);

// Toric moment map mu(u) = sum |c_j u^{beta_j}|^2 beta_j / sum |c_j u^{beta_j}|^2,
// evaluated with log-sum-exp rescaling. The value lies in the interior of
// conv(A) for u in the torus.
std::vector<double> moment_map(const std::vector<LatticeVector>& a, const std::vector<std::complex<double>>& c,
                               const std::vector<std::complex<double>>& u);

} // namespace okflow

#endif
