#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "graspguard/contact_dynamics.hpp"
#include "graspguard/disturbance_observer.hpp"
#include "graspguard/qp_solver.hpp"

namespace graspguard {

// Barriers act on the normal axis, which is axis 0 of the contact state.
// Every barrier is affine in the normal force: h = h0 + slope * f_c.

enum class BarrierKind { force_min, force_max, cone_row };

struct BarrierSpec {
  BarrierKind kind = BarrierKind::force_min;
  double limit = 0.0;       // N, force barriers only
  double alpha_gain = 1.0;  // 1/s
  int cone_row = 0;         // 0..3, row of Lambda

  static BarrierSpec force_min(double limit, double alpha);
  static BarrierSpec force_max(double limit, double alpha);
  static BarrierSpec cone(int row, double alpha);

  /// h1, h_max, h2..h5 for cone rows 0..3.
  std::string name() const;
};

void validate_barriers(const std::vector<BarrierSpec>& specs);

/// force_min, cone rows, and optionally force_max, in that order.
std::vector<BarrierSpec> standard_barriers(double f_min, double f_max, double alpha_min,
                                           double alpha_cone, double alpha_max,
                                           const std::vector<int>& cone_rows = {0, 1},
                                           bool include_max = true);

/// h per spec from a measured wrench: f_c - f_min, f_max - f_c, (Lambda F)_i.
Eigen::VectorXd barrier_values(const ContactState& state, const ContactWrench& wrench,
                               const std::vector<BarrierSpec>& specs, const ContactParams& params);

/// dh/df_c for one spec.
double barrier_slope(const BarrierSpec& spec, const ContactParams& params);

/// Lie derivatives of one barrier along the model drift
/// f(x) + F(x) theta = [p_dot; -(k p + b p_dot)/m_o].
struct BarrierTerms {
  double h = 0.0;
  double alpha = 0.0;
  double slope = 0.0;
  Eigen::RowVectorXd dh_dx;      // 1 x 2n
  double Lf = 0.0;
  Eigen::RowVectorXd Lg1;        // 1 x n
  Eigen::RowVectorXd Lg2;        // 1 x n, g2 = g1
  Eigen::RowVectorXd dh_dtheta;  // 1 x 2n, w.r.t. [k; b]
};

BarrierTerms barrier_terms(const BarrierSpec& spec, double h, const ContactState& state,
                           const ContactParams& params);

/// F(x) = -(1/m_o) [0 0; diag(p) diag(p_dot)], 2n x 2n.
Eigen::MatrixXd regressor_F(const ContactState& state, const ContactParams& params);

enum class FilterVariant { cbf, racbf, rcbf, dobcbf };

std::string to_string(FilterVariant v);
FilterVariant parse_filter_variant(const std::string& name);
std::vector<FilterVariant> all_filter_variants();

struct FilterConfig {
  FilterVariant variant = FilterVariant::cbf;
  ContactParams model;  // the filter's belief
  double w0 = 0.0;
  double w1 = 0.0;
  double beta = 1.0;
  double nu = 1.0;
  double c = 1.0;
  std::optional<BoxBounds> u_bounds;
  // RaCBF: lambda = theta_hat - Gamma (dh/dtheta)'. Off reduces lambda to theta_hat.
  bool racbf_param_gradient = true;
  double fallback_regularization = 1e-6;

  /// Throws ConfigError on an inadmissible combination.
  void validate(const std::vector<BarrierSpec>& specs) const;
};

struct RaCbfState {
  Eigen::VectorXd theta_hat;        // [k_hat; b_hat]
  Eigen::MatrixXd Gamma;            // SPD
  Eigen::VectorXd theta_tilde_max;  // worst-case estimation error
  Eigen::VectorXd lower;            // box Theta
  Eigen::VectorXd upper;

  /// theta_tilde_max = upper - lower.
  static RaCbfState from_box(Eigen::VectorXd theta_hat, Eigen::MatrixXd Gamma,
                             Eigen::VectorXd lower, Eigen::VectorXd upper);
  void validate() const;
  /// 1/2 theta_tilde' Gamma^-1 theta_tilde
  double tightening() const;
  /// lambda_min(Gamma) >= ||theta_tilde||^2 / (2 h); vacuous for h <= 0.
  bool gamma_condition(double h) const;
  Eigen::VectorXd project(const Eigen::VectorXd& theta) const;
};

/// Constraint block A u + lb >= 0, one row per barrier.
struct ConstraintRows {
  Eigen::MatrixXd A;
  Eigen::VectorXd lb;
};

struct FilterOutput {
  Eigen::VectorXd u;
  bool infeasible = false;
  bool gamma_condition_violated = false;
  ConstraintRows rows;
};

ConstraintRows cbf_constraints(const std::vector<BarrierSpec>& specs, const Eigen::VectorXd& h,
                               const ContactState& state, const FilterConfig& config);
ConstraintRows rcbf_constraints(const std::vector<BarrierSpec>& specs, const Eigen::VectorXd& h,
                                const ContactState& state, const FilterConfig& config);
ConstraintRows dobcbf_constraints(const std::vector<BarrierSpec>& specs, const Eigen::VectorXd& h,
                                  const ContactState& state, const ObserverState& obs,
                                  const FilterConfig& config);
/// critical receives the index of the barrier with the smallest h - tightening.
ConstraintRows racbf_constraints(const std::vector<BarrierSpec>& specs, const Eigen::VectorXd& h,
                                 const ContactState& state, const RaCbfState& racbf,
                                 const FilterConfig& config, int* critical = nullptr);

/// argmin 1/2 ||u - u_nom||^2 s.t. rows and u in U. When that QP is
/// infeasible the input maximizing the smallest constraint residual over U
/// is returned instead and the output is flagged.
FilterOutput project_input(const ConstraintRows& rows, const Eigen::VectorXd& u_nominal,
                           const FilterConfig& config);

FilterOutput filter_cbf(const std::vector<BarrierSpec>& specs, const Eigen::VectorXd& h,
                        const ContactState& state, const FilterConfig& config,
                        const Eigen::VectorXd& u_nominal);
FilterOutput filter_rcbf(const std::vector<BarrierSpec>& specs, const Eigen::VectorXd& h,
                         const ContactState& state, const FilterConfig& config,
                         const Eigen::VectorXd& u_nominal);
FilterOutput filter_dobcbf(const std::vector<BarrierSpec>& specs, const Eigen::VectorXd& h,
                           const ContactState& state, const ObserverState& obs,
                           const FilterConfig& config, const Eigen::VectorXd& u_nominal);

struct RaCbfStep {
  FilterOutput output;
  RaCbfState state;
};

/// Solves the tightened QP, then one Euler step of
/// theta_hat_dot = -Gamma (dh/dx F)' for the critical barrier, projected onto Theta.
RaCbfStep filter_racbf(const std::vector<BarrierSpec>& specs, const Eigen::VectorXd& h,
                       const ContactState& state, const RaCbfState& racbf,
                       const FilterConfig& config, const Eigen::VectorXd& u_nominal, double dt);

/// beta > e0^2 / (2 h0) with h0 the smallest initial barrier value.
bool dobcbf_beta_condition(double beta, double e0_norm, double h0_min);

}  // namespace graspguard
