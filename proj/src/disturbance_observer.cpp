#include "graspguard/disturbance_observer.hpp"

#include <cmath>

#include "graspguard/error.hpp"

namespace graspguard {

void ObserverState::validate() const {
  require(alpha_d > 0.0, "ObserverState: alpha_d must be > 0");
  require(c > 0.0 && c < 2.0 * alpha_d, "ObserverState: need 0 < c < 2 alpha_d");
  require(z.size() == d_hat.size(), "ObserverState: z and d_hat differ in dimension");
}

ObserverState ObserverState::initialize(double alpha_d, double c, const ContactState& x0,
                                        const ContactParams& model) {
  ObserverState obs;
  obs.alpha_d = alpha_d;
  obs.c = c;
  obs.z = -alpha_d * gain_P(x0, model);
  obs.d_hat = Eigen::VectorXd::Zero(x0.dim());
  obs.validate();
  return obs;
}

Eigen::VectorXd gain_P(const ContactState& state, const ContactParams& params) {
  check_dims(state, params);
  return (params.k.array() * state.p.array() + params.b.array() * state.p_dot.array()).matrix();
}

Eigen::MatrixXd gain_Ld(const ContactParams& params) {
  const Eigen::Index n = params.dim();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, 2 * n);
  L.leftCols(n) = params.k.asDiagonal();
  L.rightCols(n) = params.b.asDiagonal();
  return L;
}

ObserverState observer_step(const ObserverState& obs, const ContactState& state,
                            const ContactParams& params, const Eigen::VectorXd& u, double dt) {
  return observer_step(obs, state, state, params, u, dt);
}

ObserverState observer_step(const ObserverState& obs, const ContactState& state,
                            const ContactState& state_after, const ContactParams& params,
                            const Eigen::VectorXd& u, double dt) {
  require(dt > 0.0, "observer_step: dt must be > 0");
  obs.validate();
  check_dims(state, params);
  check_dims(state_after, params);
  require(u.size() == state.dim() && obs.z.size() == state.dim(), "observer_step: dimension mismatch");

  // z_dot = -alpha_d L_d (f + g1 u + g2 (z + alpha_d P(x))) along the straight
  // line from state to state_after. Holding x at the start instead leaves an
  // O(dt) bias in d_hat, because d_hat then adds the full P increment.
  auto x_at = [&](double s) {
    const double w = s / dt;
    return ContactState(state.p + w * (state_after.p - state.p), state.p_dot + w * (state_after.p_dot - state.p_dot));
  };
  auto z_dot = [&](const Eigen::VectorXd& z, double s) -> Eigen::VectorXd {
    const ContactState xs = x_at(s);
    const Eigen::VectorXd d_hat = z + obs.alpha_d * gain_P(xs, params);
    const StateRate r = disturbance_dynamics(xs, params, u, d_hat);
    return -obs.alpha_d * (params.k.cwiseProduct(r.dp) + params.b.cwiseProduct(r.dv));
  };
  const Eigen::VectorXd k1 = z_dot(obs.z, 0.0);
  const Eigen::VectorXd k2 = z_dot(obs.z + 0.5 * dt * k1, 0.5 * dt);
  const Eigen::VectorXd k3 = z_dot(obs.z + 0.5 * dt * k2, 0.5 * dt);
  const Eigen::VectorXd k4 = z_dot(obs.z + dt * k3, dt);

  ObserverState next = obs;
  next.z = obs.z + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  next.d_hat = next.z + obs.alpha_d * gain_P(state_after, params);
  return next;
}

double error_bound(const ObserverState& obs, double e0_norm, double w1, double t) {
  require(obs.c > 0.0 && obs.k() > 0.0, "error_bound: need c > 0 and alpha_d - c/2 > 0");
  require(t >= 0.0, "error_bound: t must be >= 0");
  const double k = obs.k();
  const double decay = std::exp(-2.0 * k * t);
  const double two_ck = 2.0 * obs.c * k;
  return std::sqrt((two_ck * e0_norm * e0_norm * decay + w1 * w1 * (1.0 - decay)) / two_ck);
}

double gain_condition_margin(const ContactParams& params) {
  params.validate();
  return params.b.minCoeff() / params.m_o - 1.0;
}

}  // namespace graspguard
