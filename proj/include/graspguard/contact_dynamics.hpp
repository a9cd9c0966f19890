#pragma once

#include <Eigen/Dense>

namespace graspguard {

/// Penetration state x = [p, p_dot] of one or more contact axes.
struct ContactState {
  Eigen::VectorXd p;      // m, >= 0
  Eigen::VectorXd p_dot;  // m/s

  ContactState() = default;
  ContactState(Eigen::VectorXd penetration, Eigen::VectorXd rate);

  static ContactState zero(Eigen::Index axes);
  static ContactState scalar(double penetration, double rate);

  Eigen::Index dim() const { return p.size(); }
  Eigen::VectorXd stacked() const;
  double norm() const;

  // Clamps penetration at zero and zeroes the rate on separated axes.
  void clamp_separation();
};

/// Time derivative of a ContactState: [p_dot; p_ddot].
struct StateRate {
  Eigen::VectorXd dp;
  Eigen::VectorXd dv;

  Eigen::VectorXd stacked() const;
};

/// Kelvin-Voigt contact parameters. theta = [k; b] is the stacked vector the
/// adaptive filter estimates.
struct ContactParams {
  Eigen::VectorXd k;  // N/m per axis
  Eigen::VectorXd b;  // N*s/m per axis
  double m_o = 1.0;   // kg
  double mu = 1.0;
  double eta = 1.0;
  double a = 1.0;     // m

  static ContactParams uniform(Eigen::Index axes, double stiffness, double damping, double mass,
                               double mu = 1.0, double eta = 1.0, double a = 1.0);

  Eigen::Index dim() const { return k.size(); }
  Eigen::VectorXd theta() const;
  ContactParams with_theta(const Eigen::VectorXd& theta) const;

  /// Throws ContractViolation unless every entry is strictly positive.
  void validate() const;
};

/// Contact wrench in the contact frame. f_cz is the normal force taken
/// positive when compressive, so the Kelvin-Voigt force along the normal
/// axis is f_c = -f_cz.
struct ContactWrench {
  double f_cx = 0.0;
  double f_cy = 0.0;
  double f_cz = 0.0;
  double tau_cz = 0.0;

  /// {f_cx, f_cy, f_cz, |tau_cz|}
  Eigen::Vector4d cone_vector() const;
  bool finite() const;
};

/// A disturbance sample with its magnitude and rate bounds.
struct Disturbance {
  Eigen::VectorXd d;
  double w0 = 0.0;
  double w1 = 0.0;
};

void check_dims(const ContactState& state, const ContactParams& params);

/// f_c = -diag(k) p - diag(b) p_dot. Negative entries are compressive.
Eigen::VectorXd contact_force(const ContactState& state, const ContactParams& params);

/// x_dot = f(x) + F(x) theta + g1(x) u for the parametric form:
/// [p_dot; (u - diag(p) k - diag(p_dot) b) / m_o].
StateRate parametric_dynamics(const ContactState& state, const ContactParams& params,
                              const Eigen::VectorXd& u);

/// Disturbance form: [p_dot; (u + d - diag(p) k - diag(p_dot) b) / m_o].
StateRate disturbance_dynamics(const ContactState& state, const ContactParams& params,
                               const Eigen::VectorXd& u, const Eigen::VectorXd& d);

/// f_cz - |(f_cx, f_cy)| / mu - |tau_cz| / (a eta). Non-negative inside the
/// exact soft-finger cone.
double friction_cone_residual(const ContactWrench& w, const ContactParams& params);

/// Four tangent planes of the soft-finger cone; row i of Lambda * F >= 0 is
/// one planar constraint.
Eigen::Matrix4d linearized_cone_matrix(const ContactParams& params);

/// One fixed-step RK4 step of the disturbance form under constant u and a
/// disturbance sampled at the stage times.
template <class DisturbanceFn>
ContactState rk4_step(const ContactState& x, const ContactParams& params, const Eigen::VectorXd& u,
                      DisturbanceFn&& disturbance_at, double t, double dt) {
  auto rate = [&](const ContactState& s, double ts) {
    return disturbance_dynamics(s, params, u, disturbance_at(ts));
  };
  auto shifted = [](const ContactState& s, const StateRate& r, double h) {
    return ContactState(s.p + h * r.dp, s.p_dot + h * r.dv);
  };
  const StateRate k1 = rate(x, t);
  const StateRate k2 = rate(shifted(x, k1, 0.5 * dt), t + 0.5 * dt);
  const StateRate k3 = rate(shifted(x, k2, 0.5 * dt), t + 0.5 * dt);
  const StateRate k4 = rate(shifted(x, k3, dt), t + dt);
  ContactState next(x.p + dt / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp),
                    x.p_dot + dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv));
  return next;
}

}  // namespace graspguard
