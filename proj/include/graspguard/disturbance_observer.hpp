#pragma once

#include <Eigen/Dense>

#include "graspguard/contact_dynamics.hpp"

namespace graspguard {

/// Nonlinear disturbance observer  d_hat = z + alpha_d P(x),
/// z_dot = -alpha_d L_d (f + g1 u + g2 d_hat).
struct ObserverState {
  Eigen::VectorXd z;
  Eigen::VectorXd d_hat;
  double alpha_d = 1.0;
  double c = 1.0;

  /// Decay rate of the error bound, alpha_d - c/2.
  double k() const { return alpha_d - 0.5 * c; }
  void validate() const;

  /// z(0) = -alpha_d P(x0), so d_hat(0) = 0.
  static ObserverState initialize(double alpha_d, double c, const ContactState& x0,
                                  const ContactParams& model);
};

/// P(x) = diag(k) p + diag(b) p_dot  (= -contact_force).
Eigen::VectorXd gain_P(const ContactState& state, const ContactParams& params);

/// L_d = dP/dx = [diag(k), diag(b)], n x 2n.
Eigen::MatrixXd gain_Ld(const ContactParams& params);

/// One RK4 step of z over dt with the plant state and input held.
/// params are the filter's model.
ObserverState observer_step(const ObserverState& obs, const ContactState& state,
                            const ContactParams& params, const Eigen::VectorXd& u, double dt);

/// One RK4 step of z with x moving linearly from state to state_after and u
/// held, then d_hat from state_after.
ObserverState observer_step(const ObserverState& obs, const ContactState& state,
                            const ContactState& state_after, const ContactParams& params,
                            const Eigen::VectorXd& u, double dt);

/// M_d(t) = sqrt((2ck e0^2 e^{-2kt} + w1^2 (1 - e^{-2kt})) / (2ck)).
double error_bound(const ObserverState& obs, double e0_norm, double w1, double t);

/// Smallest eigenvalue of the symmetric part of L_d g2 = diag(b)/m_o minus 1.
/// Non-negative means e' e <= e' L_d g2 e holds for every e.
double gain_condition_margin(const ContactParams& params);

}  // namespace graspguard
