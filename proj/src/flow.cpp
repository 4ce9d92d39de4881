#include "okflow/flow.hpp"

#include "okflow/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>

namespace okflow {

namespace {

using CVec = std::vector<std::complex<double>>;

enum class Chart { special, trivial }; // (u~, t) vs (u, t)

constexpr double kHandover = 0.5;          // chart policy threshold on |t|
constexpr double kHandoverTol = 1e-6;      // required field agreement at switches

// Per-family evaluation cache: section series and their first derivatives in
// both charts, plus the t-exponents of the trivial-chart prefactors.
class ChartEvaluator {
public:
  explicit ChartEvaluator(const DegenerationFamily& fam) : fam_(fam) {
    const std::size_t m = fam.n + 1;
    std::int64_t pmax = 0;
    for (std::size_t j = 0; j < fam.r; ++j) pmax = std::max(pmax, lv_dot(fam.gamma, fam.betas[j]));
    for (std::size_t j = 0; j < fam.r; ++j) {
      tpow_.push_back(pmax - lv_dot(fam.gamma, fam.betas[j]));
      dtilde_.emplace_back();
      for (std::size_t i = 0; i < m; ++i) dtilde_[j].push_back(fam.sections_tilde[j].derivative(i));
      dorig_.emplace_back();
      for (std::size_t i = 0; i < fam.n; ++i) dorig_[j].push_back(fam.sections_orig[j].derivative(i));
    }
  }

  const DegenerationFamily& family() const { return fam_; }
  std::size_t n() const { return fam_.n; }
  std::size_t m() const { return fam_.n + 1; }

  // Homogeneous coordinate values and the m x r matrix of their w-derivatives
  // at a chart point w = (coords, t).
  void evaluate(const CVec& w, Chart chart, CVec& values, std::vector<CVec>& derivs) const {
    values.assign(fam_.r, {});
    derivs.assign(m(), CVec(fam_.r));
    if (chart == Chart::special) {
      for (std::size_t j = 0; j < fam_.r; ++j) {
        values[j] = fam_.sections_tilde[j].eval(w);
        for (std::size_t i = 0; i < m(); ++i) derivs[i][j] = dtilde_[j][i].eval(w);
      }
      return;
    }
    // Trivial chart: h_j = t^{p_j} f_j(u), common projective rescale already
    // applied so the t-exponents are nonnegative.
    CVec u(w.begin(), w.end() - 1);
    std::complex<double> t = w.back();
    for (std::size_t j = 0; j < fam_.r; ++j) {
      std::complex<double> f = fam_.sections_orig[j].eval(u);
      std::complex<double> tp = 1.0, tpm1 = 0.0;
      if (tpow_[j] > 0) {
        tpm1 = 1.0;
        for (std::int64_t k = 0; k + 1 < tpow_[j]; ++k) tpm1 *= t;
        tp = tpm1 * t;
      }
      values[j] = tp * f;
      for (std::size_t i = 0; i < n(); ++i) derivs[i][j] = tp * dorig_[j][i].eval(u);
      derivs[n()][j] = double(tpow_[j]) * tpm1 * f;
    }
  }

private:
  const DegenerationFamily& fam_;
  std::vector<std::int64_t> tpow_;
  std::vector<std::vector<TruncSeries>> dtilde_;
  std::vector<std::vector<TruncSeries>> dorig_;
};

CVec complexify(const Eigen::VectorXd& x) {
  CVec w(x.size() / 2);
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = {x[2 * j], x[2 * j + 1]};
  return w;
}

Eigen::VectorXd realify(const CVec& w) {
  Eigen::VectorXd x(2 * w.size());
  for (std::size_t j = 0; j < w.size(); ++j) {
    x[2 * j] = w[j].real();
    x[2 * j + 1] = w[j].imag();
  }
  return x;
}

// Hermitian coefficient matrix H_{jk} = d_j dbar_k log |h|^2 plus the
// standard summand on the t coordinate (the C factor of the product form).
Eigen::MatrixXcd hermitian_pullback(const CVec& values, const std::vector<CVec>& derivs) {
  const std::size_t m = derivs.size(), r = values.size();
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  if (!(s > 0.0) || !std::isfinite(s))
    throw input_error("pullback: homogeneous coordinates vanish or overflow at the sample point");
  Eigen::MatrixXcd h(m, m);
  CVec q(m, 0.0);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t a = 0; a < r; ++a) q[j] += derivs[j][a] * std::conj(values[a]);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < m; ++k) {
      std::complex<double> tjk = 0.0;
      for (std::size_t a = 0; a < r; ++a) tjk += derivs[j][a] * std::conj(derivs[k][a]);
      h(j, k) = tjk / s - q[j] * std::conj(q[k]) / (s * s);
    }
  h(m - 1, m - 1) += 1.0;
  return h;
}

// Real metric G(v,u) = Re s(v,u) and form Omega(v,u) = -Im s(v,u) for the
// sesquilinear s(v,u) = sum H_{jk} v_j conj(u_k).
void real_pair(const Eigen::MatrixXcd& h, Eigen::MatrixXd& g, Eigen::MatrixXd& omega) {
  const std::size_t m = h.rows();
  g.resize(2 * m, 2 * m);
  omega.resize(2 * m, 2 * m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < m; ++k) {
      double re = h(j, k).real(), im = h(j, k).imag();
      g(2 * j, 2 * k) = re;
      g(2 * j, 2 * k + 1) = im;
      g(2 * j + 1, 2 * k) = -im;
      g(2 * j + 1, 2 * k + 1) = re;
      omega(2 * j, 2 * k) = -im;
      omega(2 * j, 2 * k + 1) = re;
      omega(2 * j + 1, 2 * k) = -re;
      omega(2 * j + 1, 2 * k + 1) = -im;
    }
}

double compat_residual(const Eigen::MatrixXd& g, const Eigen::MatrixXd& omega) {
  const std::size_t dim = g.rows();
  Eigen::MatrixXd jmat = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t j = 0; j + 1 < dim; j += 2) {
    jmat(j, j + 1) = -1.0;
    jmat(j + 1, j) = 1.0;
  }
  double denom = std::max(1.0, omega.cwiseAbs().maxCoeff());
  return (omega - jmat.transpose() * g).cwiseAbs().maxCoeff() / denom;
}

KahlerSample kahler_at(const ChartEvaluator& ev, const CVec& w, Chart chart) {
  CVec values;
  std::vector<CVec> derivs;
  ev.evaluate(w, chart, values, derivs);
  Eigen::MatrixXcd h = hermitian_pullback(values, derivs);
  KahlerSample sample;
  real_pair(h, sample.metric, sample.omega);
  sample.compat_residual = compat_residual(sample.metric, sample.omega);
  Eigen::LLT<Eigen::MatrixXd> llt(sample.metric);
  if (llt.info() != Eigen::Success)
    throw input_error("pullback degenerate (truncation or near-singular point)");
  return sample;
}

// V = -G^{-1} e_{Re t} / (G^{-1})_{Re t, Re t}; reversed flips the sign.
Eigen::VectorXd field_at(const ChartEvaluator& ev, const CVec& w, Chart chart, bool reversed) {
  KahlerSample sample = kahler_at(ev, w, chart);
  const std::size_t dim = sample.metric.rows();
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
  const std::size_t re_t = dim - 2;
  e[re_t] = 1.0;
  Eigen::VectorXd grad = sample.metric.llt().solve(e);
  double norm2 = grad[re_t];
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) throw input_error("pullback degenerate (gradient norm not positive)");
  Eigen::VectorXd v = grad / (reversed ? norm2 : -norm2);
  return v;
}

// Chart transitions: trivial (u, t) <-> special (u~, t) with u_i = t^{gamma_i} u~_i.
CVec special_to_trivial(const CVec& w, const LatticeVector& gamma) {
  CVec out = w;
  std::complex<double> t = w.back();
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    std::complex<double> tp = 1.0;
    for (std::int64_t k = 0; k < gamma[i]; ++k) tp *= t;
    out[i] = w[i] * tp;
  }
  return out;
}

CVec trivial_to_special(const CVec& w, const LatticeVector& gamma) {
  CVec out = w;
  std::complex<double> t = w.back();
  if (std::abs(t) == 0.0) throw input_error("chart transition undefined at t = 0");
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    std::complex<double> tp = 1.0;
    for (std::int64_t k = 0; k < gamma[i]; ++k) tp *= t;
    out[i] = w[i] / tp;
  }
  return out;
}

// Complex Jacobian of the special -> trivial transition at a special-chart
// point, applied to a real tangent vector (holomorphic, hence C-linear).
Eigen::VectorXd push_tangent_special_to_trivial(const CVec& w, const LatticeVector& gamma,
                                                const Eigen::VectorXd& v) {
  const std::size_t m = w.size();
  CVec zeta = complexify(v);
  std::complex<double> t = w.back();
  CVec out(m);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    std::complex<double> tp = 1.0, tpm1 = (gamma[i] > 0) ? 1.0 : 0.0;
    for (std::int64_t k = 0; k + 1 < gamma[i]; ++k) tpm1 *= t;
    tp = tpm1 * t;
    out[i] = tp * zeta[i] + double(gamma[i]) * tpm1 * w[i] * zeta[m - 1];
  }
  out[m - 1] = zeta[m - 1];
  return realify(out);
}

Eigen::VectorXd push_tangent_trivial_to_special(const CVec& w_trivial, const LatticeVector& gamma,
                                                const Eigen::VectorXd& v) {
  const std::size_t m = w_trivial.size();
  CVec zeta = complexify(v);
  std::complex<double> t = w_trivial.back();
  CVec out(m);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    std::complex<double> tp = 1.0;
    for (std::int64_t k = 0; k < gamma[i]; ++k) tp *= t;
    // u~ = u / t^gamma: d u~ = du / t^g - g u t^{-g-1} dt
    out[i] = zeta[i] / tp - double(gamma[i]) * (w_trivial[i] / (tp * t)) * zeta[m - 1];
  }
  out[m - 1] = zeta[m - 1];
  return realify(out);
}

Chart chart_for(const std::complex<double>& t) { return std::abs(t) > kHandover ? Chart::trivial : Chart::special; }

} // namespace

Eigen::VectorXd FlowState::to_real() const {
  CVec w = u_tilde;
  w.push_back(t);
  return realify(w);
}

FlowState FlowState::from_real(const Eigen::VectorXd& x) {
  CVec w = complexify(x);
  FlowState s;
  s.t = w.back();
  w.pop_back();
  s.u_tilde = std::move(w);
  return s;
}

KahlerSample pullback_kahler(const DegenerationFamily& fam, const FlowState& s) {
  ChartEvaluator ev(fam);
  CVec w = s.u_tilde;
  w.push_back(s.t);
  Chart chart = chart_for(s.t);
  if (chart == Chart::special) {
    KahlerSample sample = kahler_at(ev, w, chart);
    sample.point = s;
    return sample;
  }
  // Compute in the trivial chart, report in special-chart coordinates via the
  // congruence with the transition Jacobian.
  CVec wb = special_to_trivial(w, fam.gamma);
  KahlerSample sample = kahler_at(ev, wb, Chart::trivial);
  const std::size_t dim = sample.metric.rows();
  Eigen::MatrixXd jac(dim, dim);
  for (std::size_t col = 0; col < dim; ++col)
    jac.col(col) = push_tangent_special_to_trivial(w, fam.gamma, Eigen::VectorXd::Unit(dim, col));
  KahlerSample out;
  out.point = s;
  out.metric = jac.transpose() * sample.metric * jac;
  out.omega = jac.transpose() * sample.omega * jac;
  out.compat_residual = compat_residual(out.metric, out.omega);
  return out;
}

Eigen::VectorXd grad_ham_field(const DegenerationFamily& fam, const FlowState& s) {
  ChartEvaluator ev(fam);
  CVec w = s.u_tilde;
  w.push_back(s.t);
  Chart chart = chart_for(s.t);
  if (chart == Chart::special) return field_at(ev, w, chart, false);
  CVec wb = special_to_trivial(w, fam.gamma);
  Eigen::VectorXd vb = field_at(ev, wb, Chart::trivial, false);
  return push_tangent_trivial_to_special(wb, fam.gamma, vb);
}

Trajectory integrate_flow(const DegenerationFamily& fam, const FlowState& s0, double duration, double tol) {
  namespace ode = boost::numeric::odeint;
  using state_type = std::vector<double>;

  ChartEvaluator ev(fam);
  Trajectory traj;
  const bool reversed = duration < 0;
  const double total = std::abs(duration);
  const std::size_t dim = s0.real_dim();

  Chart chart = chart_for(s0.t);
  CVec w0 = s0.u_tilde;
  w0.push_back(s0.t);
  CVec w_active = (chart == Chart::trivial) ? special_to_trivial(w0, fam.gamma) : w0;

  auto record = [&](double s, const CVec& w, Chart c) {
    CVec ws = (c == Chart::trivial) ? trivial_to_special(w, fam.gamma) : w;
    FlowState st;
    st.t = ws.back();
    st.u_tilde = CVec(ws.begin(), ws.end() - 1);
    traj.s.push_back(s);
    traj.states.push_back(std::move(st));
  };
  record(0.0, w_active, chart);

  const double im_t0 = s0.t.imag();
  traj.re_rate_min = traj.re_rate_max = -1.0; // overwritten by the first accepted step

  auto system = [&](const state_type& x, state_type& dxds, double) {
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), x.size());
    Eigen::VectorXd v = field_at(ev, complexify(xv), chart, reversed);
    dxds.assign(v.data(), v.data() + v.size());
  };

  auto stepper = ode::make_controlled<ode::runge_kutta_cash_karp54<state_type>>(tol, tol);
  state_type x(dim);
  {
    Eigen::VectorXd xv = realify(w_active);
    std::copy(xv.data(), xv.data() + dim, x.begin());
  }

  double s = 0.0;
  double dt = std::min(total, 0.05);
  const double min_dt = std::max(1e-14, 1e-12 * total);
  bool first = true;

  const double s_eps = 1e-13 * std::max(1.0, total);
  while (total - s > s_eps) {
    dt = std::min(dt, total - s);
    double re_before = x[dim - 2];
    double s_before = s;
    ode::controlled_step_result res;
    try {
      res = stepper.try_step(system, x, s, dt);
    } catch (const input_error& e) {
      traj.status = Trajectory::Status::metric_degenerate;
      traj.message = e.what();
      return traj;
    }
    if (res == ode::fail) {
      ++traj.steps_rejected;
      if (dt < min_dt) {
        traj.status = Trajectory::Status::step_underflow;
        traj.message = "left chart of validity (step size underflow)";
        return traj;
      }
      continue;
    }
    ++traj.steps_accepted;
    double ds = s - s_before;
    double rate = (x[dim - 2] - re_before) / ds * (reversed ? -1.0 : 1.0);
    if (first) {
      traj.re_rate_min = traj.re_rate_max = rate;
      first = false;
    } else {
      traj.re_rate_min = std::min(traj.re_rate_min, rate);
      traj.re_rate_max = std::max(traj.re_rate_max, rate);
    }
    traj.im_drift_max = std::max(traj.im_drift_max, std::abs(x[dim - 1] - im_t0));

    Eigen::Map<const Eigen::VectorXd> xv(x.data(), x.size());
    CVec w = complexify(xv);
    Chart want = chart_for(w.back());
    if (want != chart) {
      // Handover inside the band: both charts must give the same field.
      try {
        Eigen::VectorXd v_old = field_at(ev, w, chart, reversed);
        CVec w_new = (want == Chart::trivial) ? special_to_trivial(w, fam.gamma) : trivial_to_special(w, fam.gamma);
        Eigen::VectorXd v_new = field_at(ev, w_new, want, reversed);
        Eigen::VectorXd v_old_pushed = (want == Chart::trivial)
                                           ? push_tangent_special_to_trivial(w, fam.gamma, v_old)
                                           : push_tangent_trivial_to_special(w, fam.gamma, v_old);
        double mismatch = (v_old_pushed - v_new).cwiseAbs().maxCoeff() /
                          std::max(1.0, v_new.cwiseAbs().maxCoeff());
        traj.handover_max_mismatch = std::max(traj.handover_max_mismatch, mismatch);
        if (mismatch > kHandoverTol) {
          traj.status = Trajectory::Status::handover_mismatch;
          traj.message = "chart handover field mismatch " + std::to_string(mismatch);
          record(s, w, chart);
          return traj;
        }
        chart = want;
        w = w_new;
        Eigen::VectorXd xnew = realify(w);
        std::copy(xnew.data(), xnew.data() + dim, x.begin());
        ++traj.chart_switches;
      } catch (const input_error& e) {
        traj.status = Trajectory::Status::metric_degenerate;
        traj.message = e.what();
        record(s, w, chart);
        return traj;
      }
    }
    record(s, w, chart);
  }
  return traj;
}

AreaTransport transport_area_check(const DegenerationFamily& fam, const FlowState& s0, const Eigen::VectorXd& v1,
                                   const Eigen::VectorXd& v2, double duration, double tol, double offset_scale) {
  const std::size_t dim = s0.real_dim();
  if (v1.size() != static_cast<Eigen::Index>(dim) || v2.size() != static_cast<Eigen::Index>(dim))
    throw input_error("transport_area_check: frame dimension mismatch");
  for (const auto* v : {&v1, &v2})
    if (std::abs((*v)[dim - 2]) != 0.0 || std::abs((*v)[dim - 1]) != 0.0)
      throw input_error("transport_area_check: frame vectors must be tangent to the fiber (zero dt components)");

  KahlerSample before = pullback_kahler(fam, s0);
  AreaTransport out;
  out.area_before = v1.dot(before.omega * v2);

  Eigen::VectorXd x0 = s0.to_real();
  double h = offset_scale * std::max(1.0, x0.cwiseAbs().maxCoeff());

  auto run = [&](const Eigen::VectorXd& start) {
    Trajectory t = integrate_flow(fam, FlowState::from_real(start), duration, tol);
    if (t.status != Trajectory::Status::ok)
      throw input_error("transport_area_check: offset trajectory failed: " + t.message);
    return t;
  };

  out.base = run(x0);
  Eigen::VectorXd p1 = run(x0 + h * v1).final_state().to_real();
  Eigen::VectorXd m1 = run(x0 - h * v1).final_state().to_real();
  Eigen::VectorXd p2 = run(x0 + h * v2).final_state().to_real();
  Eigen::VectorXd m2 = run(x0 - h * v2).final_state().to_real();

  Eigen::VectorXd t1 = (p1 - m1) / (2.0 * h);
  Eigen::VectorXd t2 = (p2 - m2) / (2.0 * h);

  KahlerSample after = pullback_kahler(fam, out.base.final_state());
  out.area_after = t1.dot(after.omega * t2);
  return out;
}

std::vector<double> moment_map(const std::vector<LatticeVector>& a, const std::vector<std::complex<double>>& c,
                               const std::vector<std::complex<double>>& u) {
  if (a.size() != c.size()) throw input_error("moment_map: |A| != |c|");
  if (a.empty()) throw input_error("moment_map: empty A");
  const std::size_t n = a[0].size();
  if (u.size() != n) throw input_error("moment_map: point arity mismatch");
  std::vector<double> logmod(n);
  for (std::size_t i = 0; i < n; ++i) {
    double m = std::abs(u[i]);
    if (m == 0.0) throw input_error("moment_map: point has a zero coordinate");
    logmod[i] = std::log(m);
  }
  // Weights |c_j u^{beta_j}|^2 via log-sum-exp.
  std::vector<double> ell(a.size());
  double biggest = -1e300;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j].size() != n) throw input_error("moment_map: mixed arities in A");
    double cj = std::abs(c[j]);
    if (cj == 0.0) throw input_error("moment_map: zero coefficient");
    double lj = 2.0 * std::log(cj);
    for (std::size_t i = 0; i < n; ++i) lj += 2.0 * double(a[j][i]) * logmod[i];
    ell[j] = lj;
    biggest = std::max(biggest, lj);
  }
  double denom = 0.0;
  std::vector<double> num(n, 0.0);
  for (std::size_t j = 0; j < a.size(); ++j) {
    double wj = std::exp(ell[j] - biggest);
    denom += wj;
    for (std::size_t i = 0; i < n; ++i) num[i] += wj * double(a[j][i]);
  }
  for (auto& x : num) x /= denom;
  return num;
}

} // namespace okflow
