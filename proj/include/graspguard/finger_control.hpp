#pragma once

#include <Eigen/Dense>
#include <vector>

namespace graspguard {

/// Planar serial finger. Joint i rotates about z; the fingertip position is
/// the end of the last link in the finger base frame.
struct FingerModel {
  Eigen::VectorXd link_lengths;  // m
  Eigen::VectorXd q_lower;       // rad
  Eigen::VectorXd q_upper;

  /// Three links approximating a first finger: (0.045, 0.025, 0.026) m.
  static FingerModel planar_three_link();
  static FingerModel planar(Eigen::VectorXd lengths, Eigen::VectorXd lower, Eigen::VectorXd upper);

  Eigen::Index dof() const { return link_lengths.size(); }
  void validate() const;
  bool within_limits(const Eigen::VectorXd& q, double tol = 0.0) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& q) const;
  double reach() const { return link_lengths.sum(); }
};

Eigen::Vector2d forward_kinematics(const FingerModel& model, const Eigen::VectorXd& q);

/// 2 x r positional Jacobian.
Eigen::MatrixXd jacobian(const FingerModel& model, const Eigen::VectorXd& q);

struct IkOptions {
  double damping = 1e-3;
  double tolerance = 1e-9;  // m
  int max_iterations = 500;
};

struct IkResult {
  Eigen::VectorXd q;
  double error = 0.0;  // m
  bool converged = false;
};

/// Damped least squares from q_seed, clamped to the joint limits each iterate.
IkResult inverse_kinematics(const FingerModel& model, const Eigen::Vector2d& target,
                            const Eigen::VectorXd& q_seed, const IkOptions& opts = {});

/// u = Kp (f_desired - f_current)
Eigen::VectorXd control_force(const Eigen::VectorXd& f_desired, const Eigen::VectorXd& f_current,
                              double Kp_force);

struct ForceControllerState {
  Eigen::VectorXd integral_term;   // accumulated tau_tilde dt
  Eigen::VectorXd previous_error;  // tau_tilde of the previous step
  bool has_previous = false;
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double Kp_force = 1.0;
  double integral_limit = 1.0;  // per-joint clamp on integral_term

  static ForceControllerState zeros(Eigen::Index dof, double kp, double ki, double kd,
                                    double Kp_force = 1.0, double integral_limit = 1.0);
  void validate() const;
};

struct JointReference {
  Eigen::VectorXd q_ref;
  ForceControllerState state;
  bool singular = false;
};

/// q_ref = q_d + kp tau + ki int(tau) + kd d(tau)/dt, tau = J(q)' f_error.
/// Rectangle-rule integral with anti-windup clamp, backward-difference
/// derivative. Near a singular J the derivative term is frozen for the step.
JointReference joint_reference(const FingerModel& model, const Eigen::VectorXd& q,
                               const Eigen::VectorXd& q_d, const Eigen::Vector2d& f_error,
                               const ForceControllerState& ctrl, double dt);

/// Smallest singular value of J below this counts as singular.
inline constexpr double kSingularThreshold = 1e-6;

/// Straight-line fingertip motion from start to end over duration, solved
/// to joints by IK. All waypoints are checked for reachability up front.
class PinchTrajectory {
 public:
  PinchTrajectory(FingerModel model, Eigen::Vector2d start, Eigen::Vector2d end, double duration,
                  Eigen::VectorXd q_seed, int checkpoints = 64);

  Eigen::Vector2d point(double t) const;
  Eigen::VectorXd at(double t) const;
  double duration() const { return duration_; }
  const FingerModel& model() const { return model_; }

 private:
  FingerModel model_;
  Eigen::Vector2d start_;
  Eigen::Vector2d end_;
  double duration_;
  std::vector<Eigen::VectorXd> seeds_;  // IK solutions at evenly spaced checkpoints
};

}  // namespace graspguard
