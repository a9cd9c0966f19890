#pragma once

#include <cstdint>
#include <vector>

#include "graspguard/scenario.hpp"

namespace graspguard {

enum TraceFlag : std::uint32_t {
  kFlagInfeasible = 1u << 0,      // QP infeasible, fallback input applied
  kFlagGammaCondition = 1u << 1,  // RaCBF Gamma eigenvalue condition violated
  kFlagSingularJacobian = 1u << 2,
  kFlagNoContact = 1u << 3,       // tactile estimator reported no contact
};

/// One outer control step. State, forces and barrier values are sampled at
/// t, before the step's input is applied. h values use the true wrench and
/// true parameters; f_c_est is what the filter saw.
struct TraceRecord {
  double t = 0.0;
  double p = 0.0;
  double p_dot = 0.0;
  double f_c = 0.0;
  double f_c_est = 0.0;
  double u_nom = 0.0;
  double u_safe = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double h3 = 0.0;
  double h_max = 0.0;
  double d = 0.0;      // scenario disturbance plus parametric-mismatch equivalent
  double d_hat = 0.0;  // observer estimate (dobcbf), 0 otherwise
  double M_d = 0.0;    // observer error bound (dobcbf), 0 otherwise
  double theta_hat_k = 0.0;
  double theta_hat_b = 0.0;
  std::uint32_t flags = 0;

  bool operator==(const TraceRecord&) const = default;
};

using Trace = std::vector<TraceRecord>;

/// Runs one filter through the scenario. Throws ConfigError if the scenario
/// fails validation.
Trace run_scenario(const Scenario& scenario, FilterVariant variant);

struct FilterMetrics {
  FilterVariant variant = FilterVariant::cbf;
  double min_h1 = 0.0;
  double min_h2 = 0.0;
  double min_h3 = 0.0;
  double min_h_max = 0.0;
  bool violated_h1 = false;
  bool violated_h2 = false;
  bool violated_h3 = false;
  bool violated_h_max = false;
  double mean_input_deviation = 0.0;  // mean |u_safe - u_nom|
  int infeasible_steps = 0;
  int gamma_condition_steps = 0;
  std::size_t steps = 0;

  bool violated() const { return violated_h1 || violated_h2 || violated_h3 || violated_h_max; }
};

inline constexpr double kViolationTolerance = 1e-6;

/// Exact minima over the sampled records; violation = min < -1e-6.
FilterMetrics metrics(const Trace& trace, FilterVariant variant);

}  // namespace graspguard
