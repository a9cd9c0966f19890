#include "graspguard/contact_dynamics.hpp"

#include <cmath>
#include <string>

#include "graspguard/error.hpp"

namespace graspguard {

ContactState::ContactState(Eigen::VectorXd penetration, Eigen::VectorXd rate)
    : p(std::move(penetration)), p_dot(std::move(rate)) {
  require(p.size() == p_dot.size(), "ContactState: p and p_dot differ in dimension");
}

ContactState ContactState::zero(Eigen::Index axes) {
  return ContactState(Eigen::VectorXd::Zero(axes), Eigen::VectorXd::Zero(axes));
}

ContactState ContactState::scalar(double penetration, double rate) {
  return ContactState(Eigen::VectorXd::Constant(1, penetration), Eigen::VectorXd::Constant(1, rate));
}

Eigen::VectorXd ContactState::stacked() const {
  Eigen::VectorXd x(2 * dim());
  x << p, p_dot;
  return x;
}

double ContactState::norm() const { return std::sqrt(p.squaredNorm() + p_dot.squaredNorm()); }

void ContactState::clamp_separation() {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0) {
      p[i] = 0.0;
      p_dot[i] = 0.0;
    }
  }
}

Eigen::VectorXd StateRate::stacked() const {
  Eigen::VectorXd x(dp.size() + dv.size());
  x << dp, dv;
  return x;
}

ContactParams ContactParams::uniform(Eigen::Index axes, double stiffness, double damping,
                                     double mass, double mu, double eta, double a) {
  ContactParams params;
  params.k = Eigen::VectorXd::Constant(axes, stiffness);
  params.b = Eigen::VectorXd::Constant(axes, damping);
  params.m_o = mass;
  params.mu = mu;
  params.eta = eta;
  params.a = a;
  return params;
}

Eigen::VectorXd ContactParams::theta() const {
  Eigen::VectorXd th(2 * dim());
  th << k, b;
  return th;
}

ContactParams ContactParams::with_theta(const Eigen::VectorXd& theta) const {
  require(theta.size() == 2 * dim(), "ContactParams::with_theta: theta must have 2n entries");
  ContactParams out = *this;
  out.k = theta.head(dim());
  out.b = theta.tail(dim());
  return out;
}

void ContactParams::validate() const {
  require(k.size() == b.size() && k.size() > 0, "ContactParams: k and b must be non-empty and equal length");
  require((k.array() > 0.0).all(), "ContactParams: stiffness must be > 0");
  require((b.array() > 0.0).all(), "ContactParams: damping must be > 0");
  require(m_o > 0.0, "ContactParams: mass must be > 0");
  require(mu > 0.0 && eta > 0.0 && a > 0.0, "ContactParams: mu, eta and a must be > 0");
}

Eigen::Vector4d ContactWrench::cone_vector() const {
  return Eigen::Vector4d(f_cx, f_cy, f_cz, std::abs(tau_cz));
}

bool ContactWrench::finite() const {
  return std::isfinite(f_cx) && std::isfinite(f_cy) && std::isfinite(f_cz) && std::isfinite(tau_cz);
}

void check_dims(const ContactState& state, const ContactParams& params) {
  if (state.p.size() != state.p_dot.size() || state.p.size() != params.k.size() ||
      params.k.size() != params.b.size()) {
    throw ContractViolation("dimension mismatch: state has " + std::to_string(state.p.size()) +
                            " axes, params have " + std::to_string(params.k.size()));
  }
}

Eigen::VectorXd contact_force(const ContactState& state, const ContactParams& params) {
  check_dims(state, params);
  return -(params.k.array() * state.p.array() + params.b.array() * state.p_dot.array()).matrix();
}

StateRate parametric_dynamics(const ContactState& state, const ContactParams& params,
                              const Eigen::VectorXd& u) {
  check_dims(state, params);
  require(u.size() == state.dim(), "parametric_dynamics: input dimension mismatch");
  require(params.m_o > 0.0, "parametric_dynamics: mass must be > 0");
  // F(x) theta = -(1/m_o) [0; diag(p) k + diag(p_dot) b]
  const Eigen::ArrayXd spring_damper =
      state.p.array() * params.k.array() + state.p_dot.array() * params.b.array();
  StateRate rate;
  rate.dp = state.p_dot;
  rate.dv = ((u.array() - spring_damper) / params.m_o).matrix();
  return rate;
}

StateRate disturbance_dynamics(const ContactState& state, const ContactParams& params,
                               const Eigen::VectorXd& u, const Eigen::VectorXd& d) {
  require(d.size() == state.dim(), "disturbance_dynamics: disturbance dimension mismatch");
  return parametric_dynamics(state, params, u + d);
}

double friction_cone_residual(const ContactWrench& w, const ContactParams& params) {
  return w.f_cz - std::hypot(w.f_cx, w.f_cy) / params.mu - std::abs(w.tau_cz) / (params.a * params.eta);
}

Eigen::Matrix4d linearized_cone_matrix(const ContactParams& params) {
  require(params.mu > 0.0 && params.a > 0.0 && params.eta > 0.0,
          "linearized_cone_matrix: mu, a, eta must be > 0");
  const double mu = params.mu;
  const double t = 1.0 / (params.a * params.eta);
  Eigen::Matrix4d lambda;
  lambda << 1.0, 0.0, mu, t,
           -1.0, 0.0, mu, -t,
            0.0, 1.0, mu, t,
            0.0, -1.0, mu, -t;
  return lambda;
}

}  // namespace graspguard
