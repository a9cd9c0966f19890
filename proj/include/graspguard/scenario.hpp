#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "graspguard/contact_dynamics.hpp"
#include "graspguard/finger_control.hpp"
#include "graspguard/safety_filters.hpp"
#include "graspguard/tactile_estimation.hpp"

namespace graspguard {

inline constexpr int kScenarioSchemaVersion = 1;

/// Desired normal force: hold `initial`, ramp to overshoot * f_min, hold,
/// then ramp to -release_fraction * (f_cx / mu) (below the closure minimum).
struct ForceProfile {
  double initial = -2.0;           // N
  double hold_initial = 0.5;       // s
  double ramp_up = 1.0;            // s
  double overshoot = 1.3;          // peak = overshoot * f_min
  double hold_peak_until = 3.5;    // s, absolute time
  double ramp_down = 1.0;          // s
  double release_fraction = 0.5;   // end = -release_fraction * f_cx / mu
  bool zero = false;               // f_d = 0 throughout
};

enum class DisturbanceShape { none, constant, ramp, sinusoid };

/// Additive disturbance on the normal axis. Every shape keeps |d| <= w0 and
/// |d_dot| <= w1 by construction.
struct DisturbanceSpec {
  DisturbanceShape shape = DisturbanceShape::none;
  double w0 = 0.0;          // N
  double w1 = 0.0;          // N/s
  double start = 0.0;       // s, ramp only
  double stop = 0.0;        // s, ramp only
  double sign = 1.0;        // +1 pushes into the contact
  double frequency = 0.0;   // Hz, sinusoid; 0 picks w1 / (2 pi w0)

  double at(double t) const;
  double frequency_used() const;
};

std::string to_string(DisturbanceShape s);

enum class SensingMode { truth, tactile };

struct Scenario {
  std::string name = "scenario";
  double duration = 6.0;
  double dt_outer = 1.0 / 125.0;
  double dt_inner = 1e-3;
  unsigned long long seed = 1;
  std::vector<FilterVariant> filters = all_filter_variants();

  // plant truth
  double stiffness = 300.0;
  double damping = 10.0;
  double mass = 0.5;
  double mu = 0.055;
  double eta = 1.0;
  double a = 0.01;

  // filter belief
  double stiffness_scale = 0.6;
  double damping_scale = 0.6;
  double e_max = 0.0;  // friction uncertainty; mu_hat = mu - e_max

  double object_mass = 0.01;
  double gravity = 9.81;

  double f_min = -6.0;
  double f_max = 0.0;
  double alpha_min = 80.0;
  double alpha_cone = 65.0;
  double alpha_max = 80.0;
  std::vector<int> cone_rows{1, 2};  // 1-based rows of Lambda
  bool enforce_max = true;
  double u_min = -50.0;
  double u_max = 50.0;

  double Kp_force = 1.0;
  bool feedforward = true;
  double lag_tau = 0.0;
  ForceProfile profile;
  DisturbanceSpec disturbance;

  double initial_force = -2.0;  // N, equilibrium start
  double initial_rate = 0.0;

  double rcbf_w0 = 3.5;

  double dob_alpha_d = 20.0;
  double dob_c = 1.0;
  double dob_beta = 20.0;
  double dob_nu = 1000.0;
  double dob_w1 = 10.0;

  std::vector<double> racbf_gamma{1e5, 1e3};
  std::vector<double> racbf_theta_min{150.0, 5.0};
  std::vector<double> racbf_theta_max{330.0, 11.0};
  bool racbf_param_gradient = false;

  SensingMode sensing = SensingMode::tactile;
  double tactile_noise = 0.0;
  double tactile_kernel = 0.001;
  int tactile_neighbors = 4;
  std::vector<double> tactile_slope{0.02, 0.02, 0.05};
  std::vector<double> tactile_intercept{0.0, 0.0, 0.0};

  std::vector<double> pinch_start{0.067, 0.056};
  std::vector<double> pinch_end{0.066, 0.058};
  std::vector<double> pinch_seed{0.3, 0.5, 0.5};
  double pinch_duration = 1.0;
  double joint_kp = 0.05;
  double joint_ki = 0.01;
  double joint_kd = 0.0;
  double joint_integral_limit = 0.5;

  ContactParams true_params() const;
  ContactParams model_params() const;
  double tangential_load() const;  // f_cx per finger
  ContactState initial_state() const;
  std::vector<BarrierSpec> barriers() const;
  FilterConfig filter_config(FilterVariant v) const;
  RaCbfState racbf_initial() const;
  TactileGeometry tactile_geometry() const;
  RegressionModel tactile_model() const;
  FingerModel finger() const;
  double desired_force(double t) const;
  int inner_steps() const;
  int outer_steps() const;
  /// Total matched disturbance seen by a model-based observer:
  /// d + (k_hat - k) p + (b_hat - b) p_dot.
  double equivalent_disturbance(const ContactState& x, double t) const;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};

/// Checks every scenario invariant, collecting all findings.
ValidationReport validate_scenario(const Scenario& s);

/// Parses and validates; throws ConfigError listing each failed invariant.
Scenario parse_scenario(const std::string& text, const std::string& source = "<string>");
Scenario load_scenario(const std::string& path);

/// Parses without the invariant checks (schema and types only).
Scenario parse_scenario_unchecked(const std::string& text, const std::string& source = "<string>");

/// Markdown reference of every key, its type, default and meaning.
std::string scenario_reference_markdown();

/// Text form of a scenario that parses back to the same values.
std::string to_config_text(const Scenario& s);

}  // namespace graspguard
