#include "graspguard/safety_filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "graspguard/error.hpp"

namespace graspguard {

BarrierSpec BarrierSpec::force_min(double limit, double alpha) {
  return BarrierSpec{BarrierKind::force_min, limit, alpha, 0};
}

BarrierSpec BarrierSpec::force_max(double limit, double alpha) {
  return BarrierSpec{BarrierKind::force_max, limit, alpha, 0};
}

BarrierSpec BarrierSpec::cone(int row, double alpha) {
  return BarrierSpec{BarrierKind::cone_row, 0.0, alpha, row};
}

std::string BarrierSpec::name() const {
  switch (kind) {
    case BarrierKind::force_min: return "h1";
    case BarrierKind::force_max: return "h_max";
    case BarrierKind::cone_row: return "h" + std::to_string(cone_row + 2);
  }
  return "h?";
}

void validate_barriers(const std::vector<BarrierSpec>& specs) {
  std::optional<double> lo, hi;
  for (const auto& s : specs) {
    require(s.alpha_gain > 0.0, "barrier " + s.name() + ": alpha_gain must be > 0");
    require(std::isfinite(s.limit), "barrier " + s.name() + ": limit must be finite");
    if (s.kind == BarrierKind::cone_row) require(s.cone_row >= 0 && s.cone_row < 4, "cone_row must be in 0..3");
    if (s.kind == BarrierKind::force_min) lo = s.limit;
    if (s.kind == BarrierKind::force_max) hi = s.limit;
  }
  if (lo && hi) require(*lo <= *hi, "force_min limit must not exceed force_max limit");
}

std::vector<BarrierSpec> standard_barriers(double f_min, double f_max, double alpha_min,
                                           double alpha_cone, double alpha_max,
                                           const std::vector<int>& cone_rows, bool include_max) {
  std::vector<BarrierSpec> specs{BarrierSpec::force_min(f_min, alpha_min)};
  for (int row : cone_rows) specs.push_back(BarrierSpec::cone(row, alpha_cone));
  if (include_max) specs.push_back(BarrierSpec::force_max(f_max, alpha_max));
  validate_barriers(specs);
  return specs;
}

Eigen::VectorXd barrier_values(const ContactState& state, const ContactWrench& wrench,
                               const std::vector<BarrierSpec>& specs, const ContactParams& params) {
  check_dims(state, params);
  const double f_c = -wrench.f_cz;
  const Eigen::Matrix4d lambda = linearized_cone_matrix(params);
  const Eigen::Vector4d F = wrench.cone_vector();
  Eigen::VectorXd h(static_cast<Eigen::Index>(specs.size()));
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    const auto idx = static_cast<Eigen::Index>(i);
    switch (s.kind) {
      case BarrierKind::force_min: h[idx] = f_c - s.limit; break;
      case BarrierKind::force_max: h[idx] = s.limit - f_c; break;
      case BarrierKind::cone_row: h[idx] = lambda.row(s.cone_row).dot(F); break;
    }
  }
  return h;
}

double barrier_slope(const BarrierSpec& spec, const ContactParams& params) {
  switch (spec.kind) {
    case BarrierKind::force_min: return 1.0;
    case BarrierKind::force_max: return -1.0;
    case BarrierKind::cone_row: return -linearized_cone_matrix(params)(spec.cone_row, 2);
  }
  return 0.0;
}

BarrierTerms barrier_terms(const BarrierSpec& spec, double h, const ContactState& state,
                           const ContactParams& params) {
  check_dims(state, params);
  const Eigen::Index n = state.dim();
  BarrierTerms t;
  t.h = h;
  t.alpha = spec.alpha_gain;
  t.slope = barrier_slope(spec, params);
  // f_c = -k p - b p_dot on the normal axis
  t.dh_dx = Eigen::RowVectorXd::Zero(2 * n);
  t.dh_dx[0] = -t.slope * params.k[0];
  t.dh_dx[n] = -t.slope * params.b[0];
  const Eigen::VectorXd drift = parametric_dynamics(state, params, Eigen::VectorXd::Zero(n)).stacked();
  t.Lf = t.dh_dx.dot(drift);
  t.Lg1 = t.dh_dx.tail(n) / params.m_o;
  t.Lg2 = t.Lg1;
  t.dh_dtheta = Eigen::RowVectorXd::Zero(2 * n);
  t.dh_dtheta[0] = -t.slope * state.p[0];
  t.dh_dtheta[n] = -t.slope * state.p_dot[0];
  return t;
}

Eigen::MatrixXd regressor_F(const ContactState& state, const ContactParams& params) {
  check_dims(state, params);
  const Eigen::Index n = state.dim();
  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  F.bottomLeftCorner(n, n) = (-state.p / params.m_o).asDiagonal();
  F.bottomRightCorner(n, n) = (-state.p_dot / params.m_o).asDiagonal();
  return F;
}

std::string to_string(FilterVariant v) {
  switch (v) {
    case FilterVariant::cbf: return "cbf";
    case FilterVariant::racbf: return "racbf";
    case FilterVariant::rcbf: return "rcbf";
    case FilterVariant::dobcbf: return "dobcbf";
  }
  return "?";
}

FilterVariant parse_filter_variant(const std::string& name) {
  for (auto v : all_filter_variants())
    if (to_string(v) == name) return v;
  throw ConfigError("unknown filter '" + name + "' (expected cbf, racbf, rcbf or dobcbf)");
}

std::vector<FilterVariant> all_filter_variants() {
  return {FilterVariant::cbf, FilterVariant::racbf, FilterVariant::rcbf, FilterVariant::dobcbf};
}

void FilterConfig::validate(const std::vector<BarrierSpec>& specs) const {
  try {
    model.validate();
    validate_barriers(specs);
  } catch (const ContractViolation& e) {
    throw ConfigError(e.what());
  }
  if (!(w0 >= 0.0) || !(w1 >= 0.0)) throw ConfigError("disturbance bounds w0, w1 must be >= 0");
  if (!(fallback_regularization > 0.0)) throw ConfigError("fallback_regularization must be > 0");
  if (u_bounds) {
    if (u_bounds->lower.size() != model.dim() || u_bounds->upper.size() != model.dim())
      throw ConfigError("input bounds must match the number of contact axes");
    if ((u_bounds->lower.array() > u_bounds->upper.array()).any())
      throw ConfigError("input bounds: lower exceeds upper");
  }
  if (variant == FilterVariant::dobcbf) {
    if (!(c > 0.0)) throw ConfigError("dobcbf: c must be > 0");
    if (!(beta > 0.0)) throw ConfigError("dobcbf: beta must be > 0");
    for (const auto& s : specs) {
      if (!(4.0 * nu - 2.0 * c - 2.0 * s.alpha_gain > 0.0))
        throw ConfigError("dobcbf: nu must exceed (alpha + c)/2 for barrier " + s.name() +
                          " (nu=" + std::to_string(nu) + ", alpha=" + std::to_string(s.alpha_gain) +
                          ", c=" + std::to_string(c) + ")");
    }
  }
}

RaCbfState RaCbfState::from_box(Eigen::VectorXd theta_hat, Eigen::MatrixXd Gamma,
                                Eigen::VectorXd lower, Eigen::VectorXd upper) {
  RaCbfState s;
  s.theta_hat = std::move(theta_hat);
  s.Gamma = std::move(Gamma);
  s.lower = std::move(lower);
  s.upper = std::move(upper);
  s.theta_tilde_max = s.upper - s.lower;
  s.validate();
  return s;
}

void RaCbfState::validate() const {
  const Eigen::Index m = theta_hat.size();
  require(m > 0, "RaCbfState: empty theta_hat");
  require(Gamma.rows() == m && Gamma.cols() == m, "RaCbfState: Gamma must be square of theta size");
  require(theta_tilde_max.size() == m && lower.size() == m && upper.size() == m, "RaCbfState: size mismatch");
  require((lower.array() <= upper.array()).all(), "RaCbfState: Theta lower exceeds upper");
  require((theta_hat.array() >= lower.array()).all() && (theta_hat.array() <= upper.array()).all(),
          "RaCbfState: theta_hat outside Theta");
  require((Gamma - Gamma.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * Gamma.cwiseAbs().maxCoeff(),
          "RaCbfState: Gamma not symmetric");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Gamma, Eigen::EigenvaluesOnly);
  require(eig.eigenvalues().minCoeff() > 0.0, "RaCbfState: Gamma not positive definite");
}

double RaCbfState::tightening() const {
  return 0.5 * theta_tilde_max.dot(Gamma.ldlt().solve(theta_tilde_max));
}

bool RaCbfState::gamma_condition(double h) const {
  if (!(h > 0.0)) return true;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Gamma, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= theta_tilde_max.squaredNorm() / (2.0 * h);
}

Eigen::VectorXd RaCbfState::project(const Eigen::VectorXd& theta) const {
  return theta.cwiseMax(lower).cwiseMin(upper);
}

namespace {

void check_inputs(const std::vector<BarrierSpec>& specs, const Eigen::VectorXd& h,
                  const ContactState& state, const FilterConfig& config) {
  require(h.size() == static_cast<Eigen::Index>(specs.size()), "filter: one h value per barrier expected");
  check_dims(state, config.model);
}

template <class Row>
ConstraintRows build_rows(const std::vector<BarrierSpec>& specs, const Eigen::VectorXd& h,
                          const ContactState& state, const ContactParams& model, Row&& offset) {
  const Eigen::Index m = static_cast<Eigen::Index>(specs.size());
  const Eigen::Index n = state.dim();
  ConstraintRows rows{Eigen::MatrixXd::Zero(m, n), Eigen::VectorXd::Zero(m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& spec = specs[static_cast<std::size_t>(i)];
    const BarrierTerms t = barrier_terms(spec, h[i], state, model);
    rows.A.row(i) = t.Lg1;
    rows.lb[i] = offset(spec, t);
  }
  return rows;
}

}  // namespace

ConstraintRows cbf_constraints(const std::vector<BarrierSpec>& specs, const Eigen::VectorXd& h,
                               const ContactState& state, const FilterConfig& config) {
  check_inputs(specs, h, state, config);
  return build_rows(specs, h, state, config.model,
                    [](const BarrierSpec&, const BarrierTerms& t) { return t.Lf + t.alpha * t.h; });
}

ConstraintRows rcbf_constraints(const std::vector<BarrierSpec>& specs, const Eigen::VectorXd& h,
                                const ContactState& state, const FilterConfig& config) {
  check_inputs(specs, h, state, config);
  const double w0 = config.w0;
  return build_rows(specs, h, state, config.model, [w0](const BarrierSpec&, const BarrierTerms& t) {
    return t.Lf - t.Lg2.norm() * w0 + t.alpha * t.h;
  });
}

ConstraintRows dobcbf_constraints(const std::vector<BarrierSpec>& specs, const Eigen::VectorXd& h,
                                  const ContactState& state, const ObserverState& obs,
                                  const FilterConfig& config) {
  check_inputs(specs, h, state, config);
  require(obs.d_hat.size() == state.dim(), "dobcbf: d_hat dimension mismatch");
  const double c = config.c, beta = config.beta, nu = config.nu, w1 = config.w1;
  return build_rows(specs, h, state, config.model, [&](const BarrierSpec&, const BarrierTerms& t) {
    const double denom = 4.0 * nu - 2.0 * c - 2.0 * t.alpha;
    if (!(denom > 0.0)) throw ConfigError("dobcbf: 4 nu - 2c - 2 alpha must be > 0");
    return t.Lf + t.Lg2.dot(obs.d_hat) - w1 * w1 / (2.0 * c * beta) -
           beta * t.Lg2.squaredNorm() / denom + t.alpha * t.h;
  });
}

ConstraintRows racbf_constraints(const std::vector<BarrierSpec>& specs, const Eigen::VectorXd& h,
                                 const ContactState& state, const RaCbfState& racbf,
                                 const FilterConfig& config, int* critical) {
  check_inputs(specs, h, state, config);
  racbf.validate();
  require(racbf.theta_hat.size() == 2 * state.dim(), "racbf: theta_hat must have 2n entries");
  const ContactParams model = config.model.with_theta(racbf.theta_hat);
  const double T = racbf.tightening();
  const Eigen::Index n = state.dim();
  Eigen::VectorXd f_par = Eigen::VectorXd::Zero(2 * n);
  f_par.head(n) = state.p_dot;
  const Eigen::MatrixXd F = regressor_F(state, model);

  double worst = std::numeric_limits<double>::infinity();
  int worst_idx = -1;
  int idx = 0;
  ConstraintRows rows = build_rows(specs, h, state, model, [&](const BarrierSpec&, const BarrierTerms& t) {
    Eigen::VectorXd lambda = racbf.theta_hat;
    if (config.racbf_param_gradient) lambda -= racbf.Gamma * t.dh_dtheta.transpose();
    if (t.h - T < worst) {
      worst = t.h - T;
      worst_idx = idx;
    }
    ++idx;
    return t.dh_dx.dot(f_par + F * lambda) + t.alpha * (t.h - T);
  });
  if (critical) *critical = worst_idx;
  return rows;
}

FilterOutput project_input(const ConstraintRows& rows, const Eigen::VectorXd& u_nominal,
                           const FilterConfig& config) {
  const Eigen::Index n = u_nominal.size();
  require(rows.A.rows() == 0 || rows.A.cols() == n, "project_input: A must have one column per input");
  FilterOutput out;
  out.rows = rows;

  QpProblem qp;
  qp.H = Eigen::MatrixXd::Identity(n, n);
  qp.g = -u_nominal;
  qp.A = rows.A.rows() ? rows.A : Eigen::MatrixXd::Zero(0, n);
  qp.lb = rows.lb;
  qp.box = config.u_bounds;
  const QpSolution sol = solve(qp);
  if (sol.solved()) {
    out.u = sol.u;
    return out;
  }

  // Max-min residual over (u, s): maximize s subject to A u + lb >= s, u in U,
  // with a small proximal term keeping the solution unique and near u_nom.
  const double eps = config.fallback_regularization;
  const Eigen::Index m = rows.A.rows();
  const Eigen::Index box_rows = config.u_bounds ? 2 * n : 0;
  QpProblem fb;
  fb.H = eps * Eigen::MatrixXd::Identity(n + 1, n + 1);
  fb.g = Eigen::VectorXd::Zero(n + 1);
  fb.g.head(n) = -eps * u_nominal;
  fb.g[n] = -1.0;
  fb.A = Eigen::MatrixXd::Zero(m + box_rows, n + 1);
  fb.lb = Eigen::VectorXd::Zero(m + box_rows);
  fb.A.topLeftCorner(m, n) = rows.A;
  fb.A.block(0, n, m, 1).setConstant(-1.0);
  fb.lb.head(m) = rows.lb;
  if (config.u_bounds) {
    for (Eigen::Index i = 0; i < n; ++i) {
      fb.A(m + i, i) = 1.0;
      fb.lb[m + i] = -config.u_bounds->lower[i];
      fb.A(m + n + i, i) = -1.0;
      fb.lb[m + n + i] = config.u_bounds->upper[i];
    }
  }
  const QpSolution fsol = solve(fb);
  out.u = fsol.u.head(n);
  out.infeasible = true;
  return out;
}

FilterOutput filter_cbf(const std::vector<BarrierSpec>& specs, const Eigen::VectorXd& h,
                        const ContactState& state, const FilterConfig& config,
                        const Eigen::VectorXd& u_nominal) {
  return project_input(cbf_constraints(specs, h, state, config), u_nominal, config);
}

FilterOutput filter_rcbf(const std::vector<BarrierSpec>& specs, const Eigen::VectorXd& h,
                         const ContactState& state, const FilterConfig& config,
                         const Eigen::VectorXd& u_nominal) {
  require(config.w0 >= 0.0, "rcbf: w0 must be >= 0");
  return project_input(rcbf_constraints(specs, h, state, config), u_nominal, config);
}

FilterOutput filter_dobcbf(const std::vector<BarrierSpec>& specs, const Eigen::VectorXd& h,
                           const ContactState& state, const ObserverState& obs,
                           const FilterConfig& config, const Eigen::VectorXd& u_nominal) {
  return project_input(dobcbf_constraints(specs, h, state, obs, config), u_nominal, config);
}

RaCbfStep filter_racbf(const std::vector<BarrierSpec>& specs, const Eigen::VectorXd& h,
                       const ContactState& state, const RaCbfState& racbf,
                       const FilterConfig& config, const Eigen::VectorXd& u_nominal, double dt) {
  require(dt > 0.0, "racbf: dt must be > 0");
  int critical = -1;
  RaCbfStep step;
  step.output = project_input(racbf_constraints(specs, h, state, racbf, config, &critical), u_nominal, config);
  for (Eigen::Index i = 0; i < h.size(); ++i)
    if (!racbf.gamma_condition(h[i])) step.output.gamma_condition_violated = true;

  step.state = racbf;
  if (critical >= 0) {
    const ContactParams model = config.model.with_theta(racbf.theta_hat);
    const BarrierTerms t = barrier_terms(specs[static_cast<std::size_t>(critical)], h[critical], state, model);
    const Eigen::RowVectorXd dhF = t.dh_dx * regressor_F(state, model);
    step.state.theta_hat = racbf.project(racbf.theta_hat - dt * racbf.Gamma * dhF.transpose());
  }
  return step;
}

bool dobcbf_beta_condition(double beta, double e0_norm, double h0_min) {
  if (!(h0_min > 0.0)) return false;
  return beta > e0_norm * e0_norm / (2.0 * h0_min);
}

}  // namespace graspguard
