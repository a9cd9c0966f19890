#include "graspguard/finger_control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "graspguard/error.hpp"

namespace graspguard {

FingerModel FingerModel::planar_three_link() {
  Eigen::VectorXd lengths(3);
  lengths << 0.045, 0.025, 0.026;
  Eigen::VectorXd lower(3), upper(3);
  lower << -0.35, 0.0, 0.0;
  upper << 1.57, 1.57, 1.57;
  return planar(lengths, lower, upper);
}

FingerModel FingerModel::planar(Eigen::VectorXd lengths, Eigen::VectorXd lower, Eigen::VectorXd upper) {
  FingerModel m{std::move(lengths), std::move(lower), std::move(upper)};
  m.validate();
  return m;
}

void FingerModel::validate() const {
  require(dof() >= 2, "FingerModel: need at least 2 joints");
  require((link_lengths.array() > 0.0).all(), "FingerModel: link lengths must be > 0");
  require(q_lower.size() == dof() && q_upper.size() == dof(), "FingerModel: one limit pair per joint");
  require((q_lower.array() <= q_upper.array()).all(), "FingerModel: lower limit exceeds upper");
}

bool FingerModel::within_limits(const Eigen::VectorXd& q, double tol) const {
  return q.size() == dof() && (q.array() >= q_lower.array() - tol).all() &&
         (q.array() <= q_upper.array() + tol).all();
}

Eigen::VectorXd FingerModel::clamp(const Eigen::VectorXd& q) const { return q.cwiseMax(q_lower).cwiseMin(q_upper); }

Eigen::Vector2d forward_kinematics(const FingerModel& model, const Eigen::VectorXd& q) {
  require(q.size() == model.dof(), "forward_kinematics: q has wrong size");
  Eigen::Vector2d x = Eigen::Vector2d::Zero();
  double angle = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    angle += q[i];
    x += model.link_lengths[i] * Eigen::Vector2d(std::cos(angle), std::sin(angle));
  }
  return x;
}

Eigen::MatrixXd jacobian(const FingerModel& model, const Eigen::VectorXd& q) {
  require(q.size() == model.dof(), "jacobian: q has wrong size");
  const Eigen::Index r = q.size();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2, r);
  // column j sums the contributions of links j..r-1
  double angle = 0.0;
  for (Eigen::Index i = 0; i < r; ++i) {
    angle += q[i];
    const double l = model.link_lengths[i];
    for (Eigen::Index j = 0; j <= i; ++j) {
      J(0, j) -= l * std::sin(angle);
      J(1, j) += l * std::cos(angle);
    }
  }
  return J;
}

IkResult inverse_kinematics(const FingerModel& model, const Eigen::Vector2d& target,
                            const Eigen::VectorXd& q_seed, const IkOptions& opts) {
  require(q_seed.size() == model.dof(), "inverse_kinematics: seed has wrong size");
  IkResult res;
  res.q = model.clamp(q_seed);
  const double lambda2 = opts.damping * opts.damping;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Eigen::Vector2d err = target - forward_kinematics(model, res.q);
    res.error = err.norm();
    if (res.error <= opts.tolerance) {
      res.converged = true;
      return res;
    }
    const Eigen::MatrixXd J = jacobian(model, res.q);
    // Damping scaled to the link size keeps the step well conditioned.
    const Eigen::Matrix2d JJt = J * J.transpose() + lambda2 * model.reach() * model.reach() * Eigen::Matrix2d::Identity();
    res.q = model.clamp(res.q + J.transpose() * JJt.ldlt().solve(err));
  }
  res.error = (target - forward_kinematics(model, res.q)).norm();
  res.converged = res.error <= opts.tolerance;
  return res;
}

Eigen::VectorXd control_force(const Eigen::VectorXd& f_desired, const Eigen::VectorXd& f_current,
                              double Kp_force) {
  require(f_desired.size() == f_current.size(), "control_force: dimension mismatch");
  return Kp_force * (f_desired - f_current);
}

ForceControllerState ForceControllerState::zeros(Eigen::Index dof, double kp, double ki, double kd,
                                                 double Kp_force, double integral_limit) {
  ForceControllerState s;
  s.integral_term = Eigen::VectorXd::Zero(dof);
  s.previous_error = Eigen::VectorXd::Zero(dof);
  s.kp = kp;
  s.ki = ki;
  s.kd = kd;
  s.Kp_force = Kp_force;
  s.integral_limit = integral_limit;
  s.validate();
  return s;
}

void ForceControllerState::validate() const {
  require(kp >= 0.0 && ki >= 0.0 && kd >= 0.0 && Kp_force >= 0.0, "ForceControllerState: gains must be >= 0");
  require(integral_limit >= 0.0, "ForceControllerState: integral_limit must be >= 0");
  require(integral_term.size() == previous_error.size(), "ForceControllerState: state size mismatch");
}

JointReference joint_reference(const FingerModel& model, const Eigen::VectorXd& q,
                               const Eigen::VectorXd& q_d, const Eigen::Vector2d& f_error,
                               const ForceControllerState& ctrl, double dt) {
  require(dt > 0.0, "joint_reference: dt must be > 0");
  require(q_d.size() == model.dof(), "joint_reference: q_d has wrong size");
  require(model.within_limits(q, 1e-12), "joint_reference: q outside joint limits");
  ctrl.validate();
  require(ctrl.integral_term.size() == model.dof(), "joint_reference: controller sized for another finger");

  const Eigen::MatrixXd J = jacobian(model, q);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
  const bool singular = svd.singularValues().minCoeff() < kSingularThreshold;
  const Eigen::VectorXd tau = J.transpose() * f_error;

  JointReference out;
  out.singular = singular;
  out.state = ctrl;
  out.state.integral_term =
      (ctrl.integral_term + dt * tau).cwiseMax(-ctrl.integral_limit).cwiseMin(ctrl.integral_limit);
  Eigen::VectorXd derivative = Eigen::VectorXd::Zero(tau.size());
  if (ctrl.has_previous && !singular) derivative = (tau - ctrl.previous_error) / dt;
  out.state.previous_error = tau;
  out.state.has_previous = true;
  out.q_ref = q_d + ctrl.kp * tau + ctrl.ki * out.state.integral_term + ctrl.kd * derivative;
  return out;
}

PinchTrajectory::PinchTrajectory(FingerModel model, Eigen::Vector2d start, Eigen::Vector2d end,
                                 double duration, Eigen::VectorXd q_seed, int checkpoints)
    : model_(std::move(model)), start_(start), end_(end), duration_(duration) {
  model_.validate();
  require(duration > 0.0, "PinchTrajectory: duration must be > 0");
  require(checkpoints >= 1, "PinchTrajectory: need at least one checkpoint");
  Eigen::VectorXd seed = model_.clamp(q_seed);
  for (int i = 0; i <= checkpoints; ++i) {
    const double s = static_cast<double>(i) / checkpoints;
    const Eigen::Vector2d target = start_ + s * (end_ - start_);
    const IkResult ik = inverse_kinematics(model_, target, seed);
    if (!ik.converged)
      throw ContractViolation("PinchTrajectory: target (" + std::to_string(target.x()) + ", " +
                              std::to_string(target.y()) + ") unreachable, residual " +
                              std::to_string(ik.error) + " m");
    seed = ik.q;
    seeds_.push_back(ik.q);
  }
}

Eigen::Vector2d PinchTrajectory::point(double t) const {
  require(t >= 0.0 && t <= duration_, "PinchTrajectory: t outside [0, duration]");
  return start_ + (t / duration_) * (end_ - start_);
}

Eigen::VectorXd PinchTrajectory::at(double t) const {
  const Eigen::Vector2d target = point(t);
  const double s = t / duration_;
  // Seed from the joint-space blend of the neighbouring checkpoints so the
  // redundant solution varies continuously with t.
  const auto n = static_cast<double>(seeds_.size() - 1);
  const double pos = std::clamp(s * n, 0.0, n);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, seeds_.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  const Eigen::VectorXd seed = (1.0 - frac) * seeds_[lo] + frac * seeds_[hi];
  return inverse_kinematics(model_, target, seed).q;
}

}  // namespace graspguard
