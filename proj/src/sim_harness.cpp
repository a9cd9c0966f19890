#include "graspguard/sim_harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "graspguard/disturbance_observer.hpp"
#include "graspguard/error.hpp"
#include "graspguard/finger_control.hpp"

namespace graspguard {

namespace {

// Barriers recorded in the trace, always evaluated on the true wrench.
std::vector<BarrierSpec> trace_barriers(const Scenario& sc) {
  return {BarrierSpec::force_min(sc.f_min, 1.0), BarrierSpec::cone(0, 1.0), BarrierSpec::cone(1, 1.0),
          BarrierSpec::force_max(sc.f_max, 1.0)};
}

}  // namespace

Trace run_scenario(const Scenario& sc, FilterVariant variant) {
  const ValidationReport report = validate_scenario(sc);
  if (!report.ok()) {
    std::string msg = "scenario '" + sc.name + "' is invalid";
    for (const auto& e : report.errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }

  const ContactParams truth = sc.true_params();
  const ContactParams model = sc.model_params();
  const std::vector<BarrierSpec> specs = sc.barriers();
  const std::vector<BarrierSpec> recorded = trace_barriers(sc);
  const FilterConfig cfg = sc.filter_config(variant);
  cfg.validate(specs);

  ContactState x = sc.initial_state();
  const double f_cx = sc.tangential_load();

  RaCbfState racbf;
  if (variant == FilterVariant::racbf) racbf = sc.racbf_initial();
  ObserverState obs;
  double e0 = 0.0;
  const bool use_observer = variant == FilterVariant::dobcbf;
  if (use_observer) {
    obs = ObserverState::initialize(sc.dob_alpha_d, sc.dob_c, x, model);
    e0 = std::abs(sc.equivalent_disturbance(x, 0.0));
  }

  const TactileGeometry geometry = sc.tactile_geometry();
  const RegressionModel regression = sc.tactile_model();
  const Eigen::Vector3d contact_point = geometry.surface_point(0.0, 0.0);
  std::mt19937_64 rng(sc.seed);

  const FingerModel finger = sc.finger();
  const PinchTrajectory pinch(finger, Eigen::Vector2d(sc.pinch_start[0], sc.pinch_start[1]),
                              Eigen::Vector2d(sc.pinch_end[0], sc.pinch_end[1]), sc.pinch_duration,
                              Eigen::Vector3d(sc.pinch_seed[0], sc.pinch_seed[1], sc.pinch_seed[2]));
  ForceControllerState ctrl = ForceControllerState::zeros(finger.dof(), sc.joint_kp, sc.joint_ki, sc.joint_kd,
                                                          sc.Kp_force, sc.joint_integral_limit);

  const int n_out = sc.outer_steps();
  const int n_in = sc.inner_steps();
  const double lag_gain = sc.lag_tau > 0.0 ? 1.0 - std::exp(-sc.dt_inner / sc.lag_tau) : 1.0;
  double u_applied = gain_P(x, truth)[0];
  auto disturbance_at = [&](double s) { return Eigen::VectorXd::Constant(1, sc.disturbance.at(s)); };

  Trace trace;
  trace.reserve(static_cast<std::size_t>(n_out));
  for (int i = 0; i < n_out; ++i) {
    const double t = i * sc.dt_outer;
    TraceRecord rec;
    rec.t = t;
    rec.p = x.p[0];
    rec.p_dot = x.p_dot[0];

    // sense
    const double f_true = contact_force(x, truth)[0];
    const ContactWrench w_true{f_cx, 0.0, -f_true, 0.0};
    ContactWrench w_sensed = w_true;
    if (sc.sensing == SensingMode::tactile) {
      const TactileArray readings = synth_readings(contact_point, Eigen::Vector3d(f_cx, 0.0, -f_true), geometry,
                                                   regression, sc.tactile_noise, &rng);
      const auto est = estimate_contact(readings, regression);
      if (est) {
        w_sensed = ContactWrench{est->f_c.x(), est->f_c.y(), est->f_c.z(), est->tau_c.z()};
      } else {
        w_sensed = ContactWrench{};
        rec.flags |= kFlagNoContact;
      }
    }
    const double f_est = -w_sensed.f_cz;

    // nominal input: feedforward plus the force law, mapped to the pushing actuator
    const double f_d = sc.desired_force(t);
    const Eigen::VectorXd fd_vec = Eigen::VectorXd::Constant(1, f_d);
    const double law = control_force(fd_vec, Eigen::VectorXd::Constant(1, f_est), sc.Kp_force)[0];
    const double u_nom = -((sc.feedforward ? f_d : 0.0) + law);
    const Eigen::VectorXd u_nom_vec = Eigen::VectorXd::Constant(1, u_nom);

    // filter
    const Eigen::VectorXd h_filter = barrier_values(x, w_sensed, specs, model);
    FilterOutput out;
    RaCbfState racbf_next = racbf;
    switch (variant) {
      case FilterVariant::cbf: out = filter_cbf(specs, h_filter, x, cfg, u_nom_vec); break;
      case FilterVariant::rcbf: out = filter_rcbf(specs, h_filter, x, cfg, u_nom_vec); break;
      case FilterVariant::dobcbf: out = filter_dobcbf(specs, h_filter, x, obs, cfg, u_nom_vec); break;
      case FilterVariant::racbf: {
        RaCbfStep step = filter_racbf(specs, h_filter, x, racbf, cfg, u_nom_vec, sc.dt_outer);
        out = std::move(step.output);
        racbf_next = std::move(step.state);
        break;
      }
    }
    const double u_safe = out.u[0];
    if (out.infeasible) rec.flags |= kFlagInfeasible;
    if (out.gamma_condition_violated) rec.flags |= kFlagGammaCondition;

    // joint-level reference for the pinch; the inner tracker is ideal
    const Eigen::VectorXd q_d = pinch.at(std::min(t, pinch.duration()));
    const JointReference jr = joint_reference(finger, q_d, q_d, Eigen::Vector2d(0.0, f_d - f_est), ctrl, sc.dt_outer);
    ctrl = jr.state;
    if (jr.singular) rec.flags |= kFlagSingularJacobian;

    rec.f_c = f_true;
    rec.f_c_est = f_est;
    rec.u_nom = u_nom;
    rec.u_safe = u_safe;
    const Eigen::VectorXd h_true = barrier_values(x, w_true, recorded, truth);
    rec.h1 = h_true[0];
    rec.h2 = h_true[1];
    rec.h3 = h_true[2];
    rec.h_max = h_true[3];
    rec.d = sc.equivalent_disturbance(x, t);
    if (use_observer) {
      rec.d_hat = obs.d_hat[0];
      rec.M_d = error_bound(obs, e0, sc.dob_w1, t);
    }
    const Eigen::VectorXd theta = variant == FilterVariant::racbf ? racbf.theta_hat : model.theta();
    rec.theta_hat_k = theta[0];
    rec.theta_hat_b = theta[1];
    trace.push_back(rec);

    // plant and observer at the inner rate
    for (int j = 0; j < n_in; ++j) {
      const double tt = t + j * sc.dt_inner;
      u_applied += lag_gain * (u_safe - u_applied);
      const Eigen::VectorXd u_vec = Eigen::VectorXd::Constant(1, u_applied);
      ContactState next = rk4_step(x, truth, u_vec, disturbance_at, tt, sc.dt_inner);
      next.clamp_separation();
      if (use_observer) obs = observer_step(obs, x, next, model, u_vec, sc.dt_inner);
      x = std::move(next);
    }
    racbf = std::move(racbf_next);
  }
  return trace;
}

FilterMetrics metrics(const Trace& trace, FilterVariant variant) {
  require(!trace.empty(), "metrics: empty trace");
  FilterMetrics m;
  m.variant = variant;
  m.steps = trace.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  m.min_h1 = m.min_h2 = m.min_h3 = m.min_h_max = inf;
  double dev = 0.0;
  for (const auto& r : trace) {
    m.min_h1 = std::min(m.min_h1, r.h1);
    m.min_h2 = std::min(m.min_h2, r.h2);
    m.min_h3 = std::min(m.min_h3, r.h3);
    m.min_h_max = std::min(m.min_h_max, r.h_max);
    dev += std::abs(r.u_safe - r.u_nom);
    if (r.flags & kFlagInfeasible) ++m.infeasible_steps;
    if (r.flags & kFlagGammaCondition) ++m.gamma_condition_steps;
  }
  m.mean_input_deviation = dev / static_cast<double>(trace.size());
  m.violated_h1 = m.min_h1 < -kViolationTolerance;
  m.violated_h2 = m.min_h2 < -kViolationTolerance;
  m.violated_h3 = m.min_h3 < -kViolationTolerance;
  m.violated_h_max = m.min_h_max < -kViolationTolerance;
  return m;
}

}  // namespace graspguard
