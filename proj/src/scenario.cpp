#include "graspguard/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string_view>

#include "graspguard/config_text.hpp"
#include "graspguard/disturbance_observer.hpp"
#include "graspguard/error.hpp"

namespace graspguard {

std::string to_string(DisturbanceShape s) {
  switch (s) {
    case DisturbanceShape::none: return "none";
    case DisturbanceShape::constant: return "constant";
    case DisturbanceShape::ramp: return "ramp";
    case DisturbanceShape::sinusoid: return "sinusoid";
  }
  return "?";
}

double DisturbanceSpec::frequency_used() const {
  if (frequency > 0.0) return frequency;
  if (w0 <= 0.0) return 0.0;
  return w1 / (2.0 * std::numbers::pi * w0);
}

double DisturbanceSpec::at(double t) const {
  switch (shape) {
    case DisturbanceShape::none: return 0.0;
    case DisturbanceShape::constant: return sign * w0;
    case DisturbanceShape::sinusoid: return sign * w0 * std::sin(2.0 * std::numbers::pi * frequency_used() * t);
    case DisturbanceShape::ramp: {
      if (w1 <= 0.0 || t <= start) return 0.0;
      double up = std::min(w0, w1 * (t - start));
      if (t > stop) up = std::min(up, std::max(0.0, std::min(w0, w1 * (stop - start)) - w1 * (t - stop)));
      return sign * up;
    }
  }
  return 0.0;
}

ContactParams Scenario::true_params() const {
  return ContactParams::uniform(1, stiffness, damping, mass, mu, eta, a);
}

ContactParams Scenario::model_params() const {
  return ContactParams::uniform(1, stiffness_scale * stiffness, damping_scale * damping, mass, mu - e_max, eta, a);
}

double Scenario::tangential_load() const { return object_mass * gravity / 2.0; }

ContactState Scenario::initial_state() const {
  // equilibrium of k p + b p_dot = -f at the requested rate
  return ContactState::scalar((-initial_force - damping * initial_rate) / stiffness, initial_rate);
}

std::vector<BarrierSpec> Scenario::barriers() const {
  std::vector<int> rows;
  for (int r : cone_rows) rows.push_back(r - 1);
  return standard_barriers(f_min, f_max, alpha_min, alpha_cone, alpha_max, rows, enforce_max);
}

FilterConfig Scenario::filter_config(FilterVariant v) const {
  FilterConfig cfg;
  cfg.variant = v;
  cfg.model = model_params();
  cfg.u_bounds = BoxBounds{Eigen::VectorXd::Constant(1, u_min), Eigen::VectorXd::Constant(1, u_max)};
  if (v == FilterVariant::rcbf) cfg.w0 = rcbf_w0;
  if (v == FilterVariant::dobcbf) {
    cfg.w1 = dob_w1;
    cfg.beta = dob_beta;
    cfg.nu = dob_nu;
    cfg.c = dob_c;
  }
  cfg.racbf_param_gradient = racbf_param_gradient;
  return cfg;
}

RaCbfState Scenario::racbf_initial() const {
  const ContactParams m = model_params();
  Eigen::VectorXd gamma = Eigen::Map<const Eigen::VectorXd>(racbf_gamma.data(), 2);
  return RaCbfState::from_box(m.theta(), gamma.asDiagonal(),
                              Eigen::Map<const Eigen::VectorXd>(racbf_theta_min.data(), 2),
                              Eigen::Map<const Eigen::VectorXd>(racbf_theta_max.data(), 2));
}

TactileGeometry Scenario::tactile_geometry() const {
  return TactileGeometry::hemispherical_cap(0.009, tactile_kernel, tactile_neighbors);
}

RegressionModel Scenario::tactile_model() const {
  RegressionModel m;
  m.slope = Eigen::Vector3d(tactile_slope[0], tactile_slope[1], tactile_slope[2]);
  m.intercept = Eigen::Vector3d(tactile_intercept[0], tactile_intercept[1], tactile_intercept[2]);
  return m;
}

FingerModel Scenario::finger() const { return FingerModel::planar_three_link(); }

double Scenario::desired_force(double t) const {
  if (profile.zero) return 0.0;
  const ForceProfile& p = profile;
  const double peak = p.overshoot * f_min;
  const double end = -p.release_fraction * tangential_load() / mu;
  const double t_up = p.hold_initial;
  const double t_peak = t_up + p.ramp_up;
  if (t < t_up) return p.initial;
  if (t < t_peak) return p.initial + (peak - p.initial) * (t - t_up) / p.ramp_up;
  if (t < p.hold_peak_until) return peak;
  if (t < p.hold_peak_until + p.ramp_down) return peak + (end - peak) * (t - p.hold_peak_until) / p.ramp_down;
  return end;
}

int Scenario::inner_steps() const { return static_cast<int>(std::lround(dt_outer / dt_inner)); }

int Scenario::outer_steps() const { return static_cast<int>(std::lround(duration / dt_outer)); }

double Scenario::equivalent_disturbance(const ContactState& x, double t) const {
  const ContactParams tp = true_params();
  const ContactParams mp = model_params();
  return disturbance.at(t) + (mp.k[0] - tp.k[0]) * x.p[0] + (mp.b[0] - tp.b[0]) * x.p_dot[0];
}

// ---------------------------------------------------------------- validation

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool contains(const std::vector<FilterVariant>& fs, FilterVariant v) {
  return std::find(fs.begin(), fs.end(), v) != fs.end();
}

}  // namespace

ValidationReport validate_scenario(const Scenario& s) {
  ValidationReport r;
  auto err = [&](const std::string& m) { r.errors.push_back(m); };
  auto warn = [&](const std::string& m) { r.warnings.push_back(m); };

  if (!(s.dt_outer > 0.0)) err("run.dt_outer must be > 0");
  if (!(s.dt_inner > 0.0)) err("run.dt_inner must be > 0");
  if (!(s.duration >= s.dt_outer)) err("run.duration must be >= run.dt_outer");
  if (s.dt_outer > 0.0 && s.dt_inner > 0.0) {
    const double ratio = s.dt_outer / s.dt_inner;
    if (ratio < 1.0 - 1e-9 || std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
      err("run.dt_outer must be an integer multiple of run.dt_inner");
  }
  if (s.filters.empty()) err("run.filters must name at least one filter");

  bool params_ok = true;
  if (!(s.stiffness > 0.0) || !(s.damping > 0.0) || !(s.mass > 0.0)) {
    err("plant.stiffness, plant.damping and plant.mass must be > 0");
    params_ok = false;
  }
  if (!(s.mu > 0.0) || !(s.eta > 0.0) || !(s.a > 0.0)) {
    err("plant.mu, plant.eta and plant.a must be > 0");
    params_ok = false;
  }
  if (!(s.stiffness_scale > 0.0) || !(s.damping_scale > 0.0)) {
    err("model.stiffness_scale and model.damping_scale must be > 0");
    params_ok = false;
  }
  if (!(s.e_max >= 0.0) || !(s.mu - s.e_max > 0.0)) {
    err("model.e_max must satisfy 0 <= e_max < plant.mu");
    params_ok = false;
  }
  if (!(s.object_mass >= 0.0) || !(s.gravity >= 0.0)) err("object.mass and object.gravity must be >= 0");

  if (!(s.alpha_min > 0.0) || !(s.alpha_cone > 0.0) || !(s.alpha_max > 0.0)) err("limits.alpha_* must be > 0");
  if (!(s.f_min <= s.f_max)) err("limits.f_min must not exceed limits.f_max");
  std::set<int> seen;
  for (int row : s.cone_rows) {
    if (row < 1 || row > 4) err("limits.cone_rows entries must be in 1..4");
    if (!seen.insert(row).second) err("limits.cone_rows lists row " + std::to_string(row) + " twice");
  }
  if (!(s.u_min <= s.u_max)) err("limits.u_min must not exceed limits.u_max");
  if (!(s.Kp_force >= 0.0)) err("controller.Kp_force must be >= 0");
  if (!(s.lag_tau >= 0.0)) err("controller.lag_tau must be >= 0");

  const ForceProfile& p = s.profile;
  if (!(p.hold_initial >= 0.0) || !(p.ramp_up > 0.0) || !(p.ramp_down > 0.0))
    err("profile.hold_initial must be >= 0 and profile ramps > 0");
  if (!(p.hold_peak_until >= p.hold_initial + p.ramp_up)) err("profile.hold_peak_until must follow the ramp up");
  if (!(p.overshoot > 0.0)) err("profile.overshoot must be > 0");
  if (!(p.release_fraction >= 0.0)) err("profile.release_fraction must be >= 0");

  const DisturbanceSpec& d = s.disturbance;
  if (!(d.w0 >= 0.0) || !(d.w1 >= 0.0)) err("disturbance.w0 and disturbance.w1 must be >= 0");
  if (std::abs(d.sign) != 1.0) err("disturbance.sign must be +1 or -1");
  if (d.shape == DisturbanceShape::ramp && !(d.stop >= d.start)) err("disturbance.stop must be >= disturbance.start");
  if (d.shape == DisturbanceShape::sinusoid && d.frequency > 0.0 &&
      2.0 * std::numbers::pi * d.frequency * d.w0 > d.w1 * (1.0 + 1e-12))
    err("disturbance.frequency too high: 2 pi f w0 exceeds w1");

  if (!(s.rcbf_w0 >= 0.0)) err("rcbf.w0 must be >= 0");

  if (s.tactile_neighbors < 1 || s.tactile_neighbors > kSensorCount - 1) err("sensing.neighbors must be in 1..16");
  if (!(s.tactile_kernel >= 0.0) || !(s.tactile_noise >= 0.0)) err("sensing.kernel_width and sensing.noise_std must be >= 0");
  if (s.tactile_slope.size() != 3 || s.tactile_intercept.size() != 3) {
    err("sensing.slope and sensing.intercept need 3 entries");
  } else if (std::any_of(s.tactile_slope.begin(), s.tactile_slope.end(), [](double v) { return v == 0.0 || !std::isfinite(v); })) {
    err("sensing.slope entries must be finite and nonzero");
  }

  if (s.pinch_start.size() != 2 || s.pinch_end.size() != 2 || s.pinch_seed.size() != 3) {
    err("finger.pinch_start/pinch_end need 2 entries and finger.pinch_seed 3");
  } else if (!(s.pinch_duration > 0.0)) {
    err("finger.pinch_duration must be > 0");
  } else {
    try {
      PinchTrajectory(s.finger(), Eigen::Vector2d(s.pinch_start[0], s.pinch_start[1]),
                      Eigen::Vector2d(s.pinch_end[0], s.pinch_end[1]), s.pinch_duration,
                      Eigen::Vector3d(s.pinch_seed[0], s.pinch_seed[1], s.pinch_seed[2]));
    } catch (const ContractViolation& e) {
      err(std::string("finger: ") + e.what());
    }
  }
  if (!(s.joint_kp >= 0.0) || !(s.joint_ki >= 0.0) || !(s.joint_kd >= 0.0) || !(s.joint_integral_limit >= 0.0))
    err("finger gains and integral_limit must be >= 0");

  if (!params_ok || !r.errors.empty()) return r;

  // initial safety against the true contact
  const ContactState x0 = s.initial_state();
  if (x0.p[0] < 0.0) err("initial.force must be compressive (<= 0) so penetration is non-negative");
  const ContactParams tp = s.true_params();
  const double f0 = contact_force(x0, tp)[0];
  std::vector<BarrierSpec> specs;
  try {
    specs = s.barriers();
  } catch (const ContractViolation& e) {
    err(e.what());
    return r;
  }
  const ContactWrench w0{s.tangential_load(), 0.0, -f0, 0.0};
  const Eigen::VectorXd h0 = barrier_values(x0, w0, specs, tp);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (!(h0[static_cast<Eigen::Index>(i)] > 0.0))
      err("initial state outside the safe set: " + specs[i].name() + " = " + fmt_short(h0[static_cast<Eigen::Index>(i)]));
  }
  const double h0_min = h0.size() ? h0.minCoeff() : 0.0;

  if (contains(s.filters, FilterVariant::dobcbf)) {
    if (!(s.dob_alpha_d > 0.0)) err("dobcbf.alpha_d must be > 0");
    if (!(s.dob_c > 0.0) || !(s.dob_c < 2.0 * s.dob_alpha_d)) err("dobcbf.c must satisfy 0 < c < 2 alpha_d");
    if (!(s.dob_beta > 0.0)) err("dobcbf.beta must be > 0");
    if (!(s.dob_w1 >= 0.0)) err("dobcbf.w1 must be >= 0");
    for (const auto& b : specs) {
      if (!(s.dob_nu > (b.alpha_gain + s.dob_c) / 2.0))
        err("dobcbf.nu must exceed (alpha + c)/2 = " + fmt_short((b.alpha_gain + s.dob_c) / 2.0) + " for " + b.name());
    }
    const double e0 = std::abs(s.equivalent_disturbance(x0, 0.0));
    if (h0_min > 0.0 && !dobcbf_beta_condition(s.dob_beta, e0, h0_min))
      err("dobcbf.beta must exceed |e_d(0)|^2 / (2 h(x0)) = " + fmt_short(e0 * e0 / (2.0 * h0_min)));
    const double margin = gain_condition_margin(s.model_params());
    if (margin < 0.0)
      warn("observer gain condition L_d g2 >= I fails: b_hat / m_o = " + fmt_short(margin + 1.0) + " < 1");
  }

  if (contains(s.filters, FilterVariant::racbf)) {
    if (s.racbf_gamma.size() != 2 || s.racbf_theta_min.size() != 2 || s.racbf_theta_max.size() != 2) {
      err("racbf.gamma, racbf.theta_min and racbf.theta_max need 2 entries ([k, b])");
    } else {
      try {
        const RaCbfState rs = s.racbf_initial();
        const Eigen::VectorXd truth = tp.theta();
        if ((truth.array() < rs.lower.array()).any() || (truth.array() > rs.upper.array()).any())
          warn("true [k, b] lies outside racbf Theta");
        if (!(h0_min > rs.tightening()))
          warn("initial state outside the RaCBF tightened set: h(x0) = " + fmt_short(h0_min) +
               " <= " + fmt_short(rs.tightening()));
        if (!rs.gamma_condition(h0_min))
          warn("RaCBF Gamma condition lambda_min(Gamma) >= |theta_tilde|^2 / (2 h) fails at x0");
      } catch (const ContractViolation& e) {
        err(std::string("racbf: ") + e.what());
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------- schema

namespace {

struct Field {
  std::string key;
  std::string type;
  std::string doc;
  std::function<void(Scenario&, const ConfigValue&, const std::string&)> apply;
  std::function<std::string(const Scenario&)> show;
};

double as_number(const ConfigValue& v, const std::string& where) {
  if (v.kind != ConfigValue::Kind::number) throw ConfigError(where + ": expected a number, got " + v.kind_name());
  return v.number;
}

long long as_integer(const ConfigValue& v, const std::string& where) {
  const double x = as_number(v, where);
  if (!std::isfinite(x) || std::floor(x) != x || std::abs(x) > 9.0e15)
    throw ConfigError(where + ": expected an integer");
  return static_cast<long long>(x);
}

// doubles stop being exact above 2^53
unsigned long long as_seed(const ConfigValue& v, const std::string& where) {
  as_number(v, where);
  std::string_view r = v.raw;
  if (!r.empty() && r.front() == '+') r.remove_prefix(1);
  unsigned long long out = 0;
  const auto res = std::from_chars(r.data(), r.data() + r.size(), out);
  if (r.empty() || res.ec != std::errc() || res.ptr != r.data() + r.size())
    throw ConfigError(where + ": seed must be an integer in [0, 2^64)");
  return out;
}

std::string quote(const std::string& x) {
  std::string out = "\"";
  for (char c : x) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string as_string(const ConfigValue& v, const std::string& where) {
  if (v.kind != ConfigValue::Kind::string) throw ConfigError(where + ": expected a quoted string, got " + v.kind_name());
  return v.string;
}

bool as_bool(const ConfigValue& v, const std::string& where) {
  if (v.kind != ConfigValue::Kind::boolean) throw ConfigError(where + ": expected true or false, got " + v.kind_name());
  return v.boolean;
}

const std::vector<ConfigValue>& as_array(const ConfigValue& v, const std::string& where) {
  if (v.kind != ConfigValue::Kind::array) throw ConfigError(where + ": expected an array, got " + v.kind_name());
  return v.items;
}

template <class Get>
Field number(std::string key, std::string doc, Get get) {
  return {key, "number", std::move(doc),
          [get](Scenario& s, const ConfigValue& v, const std::string& w) { get(s) = as_number(v, w); },
          [get](const Scenario& s) { return fmt(get(s)); }};
}

template <class Get>
Field boolean(std::string key, std::string doc, Get get) {
  return {key, "boolean", std::move(doc),
          [get](Scenario& s, const ConfigValue& v, const std::string& w) { get(s) = as_bool(v, w); },
          [get](const Scenario& s) { return std::string(get(s) ? "true" : "false"); }};
}

template <class Get>
Field numbers(std::string key, std::string doc, Get get, std::size_t count) {
  const std::string type = count ? "number[" + std::to_string(count) + "]" : "number[]";
  return {key, type, std::move(doc),
          [get, count](Scenario& s, const ConfigValue& v, const std::string& w) {
            const auto& items = as_array(v, w);
            if (count && items.size() != count)
              throw ConfigError(w + ": expected " + std::to_string(count) + " entries, got " + std::to_string(items.size()));
            std::vector<double> out;
            for (const auto& it : items) out.push_back(as_number(it, w));
            get(s) = out;
          },
          [get](const Scenario& s) {
            std::string out = "[";
            const auto& xs = get(s);
            for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + fmt(xs[i]);
            return out + "]";
          }};
}

template <class T>
auto& mut(const T& x) {
  return const_cast<T&>(x);
}

#define GG_FIELD(expr) [](auto& s) -> auto& { return mut(expr); }

const std::vector<Field>& schema() {
  static const std::vector<Field> fields = [] {
    std::vector<Field> f;
    f.push_back({"schema_version", "integer", "Scenario format version; must be 1 when present.",
                 [](Scenario&, const ConfigValue& v, const std::string& w) {
                   if (as_integer(v, w) != kScenarioSchemaVersion)
                     throw ConfigError(w + ": unsupported schema_version (expected " +
                                       std::to_string(kScenarioSchemaVersion) + ")");
                 },
                 [](const Scenario&) { return std::to_string(kScenarioSchemaVersion); }});
    f.push_back({"run.name", "string", "Label used in reports.",
                 [](Scenario& s, const ConfigValue& v, const std::string& w) { s.name = as_string(v, w); },
                 [](const Scenario& s) { return quote(s.name); }});
    f.push_back(number("run.duration", "Simulated time (s).", GG_FIELD(s.duration)));
    f.push_back(number("run.dt_outer", "Control period (s); 1/125 by default.", GG_FIELD(s.dt_outer)));
    f.push_back(number("run.dt_inner", "RK4 plant step (s); must divide dt_outer.", GG_FIELD(s.dt_inner)));
    f.push_back({"run.seed", "integer", "Seed for sensor noise.",
                 [](Scenario& s, const ConfigValue& v, const std::string& w) {
                   s.seed = as_seed(v, w);
                 },
                 [](const Scenario& s) { return std::to_string(s.seed); }});
    f.push_back({"run.filters", "string[]", "Filters to run: any of \"cbf\", \"racbf\", \"rcbf\", \"dobcbf\".",
                 [](Scenario& s, const ConfigValue& v, const std::string& w) {
                   s.filters.clear();
                   for (const auto& it : as_array(v, w)) {
                     const FilterVariant fv = parse_filter_variant(as_string(it, w));
                     if (contains(s.filters, fv)) throw ConfigError(w + ": filter listed twice");
                     s.filters.push_back(fv);
                   }
                 },
                 [](const Scenario& s) {
                   std::string out = "[";
                   for (std::size_t i = 0; i < s.filters.size(); ++i)
                     out += (i ? ", \"" : "\"") + to_string(s.filters[i]) + "\"";
                   return out + "]";
                 }});

    f.push_back(number("plant.stiffness", "True contact stiffness k (N/m).", GG_FIELD(s.stiffness)));
    f.push_back(number("plant.damping", "True contact damping b (N s/m).", GG_FIELD(s.damping)));
    f.push_back(number("plant.mass", "Effective mass m_o (kg).", GG_FIELD(s.mass)));
    f.push_back(number("plant.mu", "Friction coefficient.", GG_FIELD(s.mu)));
    f.push_back(number("plant.eta", "Torsional friction coefficient.", GG_FIELD(s.eta)));
    f.push_back(number("plant.a", "Unit-consistency length of the soft-finger cone (m).", GG_FIELD(s.a)));

    f.push_back(number("model.stiffness_scale", "Filter belief k_hat = scale * k.", GG_FIELD(s.stiffness_scale)));
    f.push_back(number("model.damping_scale", "Filter belief b_hat = scale * b.", GG_FIELD(s.damping_scale)));
    f.push_back(number("model.e_max", "Friction uncertainty; filters use mu_hat = mu - e_max.", GG_FIELD(s.e_max)));

    f.push_back(number("object.mass", "Grasped object mass (kg); each finger carries m g / 2 tangentially.",
                       GG_FIELD(s.object_mass)));
    f.push_back(number("object.gravity", "Gravitational acceleration (m/s^2).", GG_FIELD(s.gravity)));

    f.push_back(number("limits.f_min", "Most compressive allowed normal force (N).", GG_FIELD(s.f_min)));
    f.push_back(number("limits.f_max", "Least compressive allowed normal force (N).", GG_FIELD(s.f_max)));
    f.push_back(number("limits.alpha_min", "Class-K slope of h1 (1/s).", GG_FIELD(s.alpha_min)));
    f.push_back(number("limits.alpha_cone", "Class-K slope of the cone barriers (1/s).", GG_FIELD(s.alpha_cone)));
    f.push_back(number("limits.alpha_max", "Class-K slope of h_max (1/s).", GG_FIELD(s.alpha_max)));
    f.push_back({"limits.cone_rows", "integer[]", "Rows of Lambda enforced as barriers (1-based).",
                 [](Scenario& s, const ConfigValue& v, const std::string& w) {
                   s.cone_rows.clear();
                   for (const auto& it : as_array(v, w)) s.cone_rows.push_back(static_cast<int>(as_integer(it, w)));
                 },
                 [](const Scenario& s) {
                   std::string out = "[";
                   for (std::size_t i = 0; i < s.cone_rows.size(); ++i)
                     out += (i ? ", " : "") + std::to_string(s.cone_rows[i]);
                   return out + "]";
                 }});
    f.push_back(boolean("limits.enforce_max", "Enforce h_max = f_max - f_c as a barrier.", GG_FIELD(s.enforce_max)));
    f.push_back(number("limits.u_min", "Lower bound of the admissible input box U (N).", GG_FIELD(s.u_min)));
    f.push_back(number("limits.u_max", "Upper bound of the admissible input box U (N).", GG_FIELD(s.u_max)));

    f.push_back(number("controller.Kp_force", "Force gain K_p in u = K_p (f_d - f_c).", GG_FIELD(s.Kp_force)));
    f.push_back(boolean("controller.feedforward", "Add the desired force as feedforward to the nominal input.",
                        GG_FIELD(s.feedforward)));
    f.push_back(number("controller.lag_tau", "First-order lag of the inner tracking loop (s); 0 is ideal.",
                       GG_FIELD(s.lag_tau)));

    f.push_back(boolean("profile.zero", "Command f_d = 0 throughout.", GG_FIELD(s.profile.zero)));
    f.push_back(number("profile.initial", "Desired force before the ramp (N).", GG_FIELD(s.profile.initial)));
    f.push_back(number("profile.hold_initial", "Time the initial level is held (s).", GG_FIELD(s.profile.hold_initial)));
    f.push_back(number("profile.ramp_up", "Ramp duration to the peak (s).", GG_FIELD(s.profile.ramp_up)));
    f.push_back(number("profile.overshoot", "Peak desired force as a multiple of f_min.", GG_FIELD(s.profile.overshoot)));
    f.push_back(number("profile.hold_peak_until", "Time the peak is held until (s).", GG_FIELD(s.profile.hold_peak_until)));
    f.push_back(number("profile.ramp_down", "Ramp duration to the release level (s).", GG_FIELD(s.profile.ramp_down)));
    f.push_back(number("profile.release_fraction",
                       "Final desired force is -fraction * f_cx / mu, below the closure minimum when < 1.",
                       GG_FIELD(s.profile.release_fraction)));

    f.push_back({"disturbance.shape", "string", "One of \"none\", \"constant\", \"ramp\", \"sinusoid\".",
                 [](Scenario& s, const ConfigValue& v, const std::string& w) {
                   const std::string name = as_string(v, w);
                   for (auto sh : {DisturbanceShape::none, DisturbanceShape::constant, DisturbanceShape::ramp,
                                   DisturbanceShape::sinusoid})
                     if (to_string(sh) == name) {
                       s.disturbance.shape = sh;
                       return;
                     }
                   throw ConfigError(w + ": unknown disturbance shape '" + name + "'");
                 },
                 [](const Scenario& s) { return "\"" + to_string(s.disturbance.shape) + "\""; }});
    f.push_back(number("disturbance.w0", "Magnitude bound (N).", GG_FIELD(s.disturbance.w0)));
    f.push_back(number("disturbance.w1", "Rate bound (N/s); the ramp slope.", GG_FIELD(s.disturbance.w1)));
    f.push_back(number("disturbance.start", "Ramp onset (s).", GG_FIELD(s.disturbance.start)));
    f.push_back(number("disturbance.stop", "Ramp release (s).", GG_FIELD(s.disturbance.stop)));
    f.push_back(number("disturbance.sign", "+1 pushes into the contact, -1 pulls out.", GG_FIELD(s.disturbance.sign)));
    f.push_back(number("disturbance.frequency", "Sinusoid frequency (Hz); 0 uses w1 / (2 pi w0).",
                       GG_FIELD(s.disturbance.frequency)));

    f.push_back(number("initial.force", "Equilibrium normal force at t = 0 (N).", GG_FIELD(s.initial_force)));
    f.push_back(number("initial.rate", "Penetration rate at t = 0 (m/s).", GG_FIELD(s.initial_rate)));

    f.push_back(number("rcbf.w0", "Disturbance magnitude bound assumed by the RCBF (N).", GG_FIELD(s.rcbf_w0)));

    f.push_back(number("dobcbf.alpha_d", "Observer gain.", GG_FIELD(s.dob_alpha_d)));
    f.push_back(number("dobcbf.c", "Observer bound constant, 0 < c < 2 alpha_d.", GG_FIELD(s.dob_c)));
    f.push_back(number("dobcbf.beta", "Compensation constant beta.", GG_FIELD(s.dob_beta)));
    f.push_back(number("dobcbf.nu", "Compensation constant nu > (alpha + c)/2.", GG_FIELD(s.dob_nu)));
    f.push_back(number("dobcbf.w1", "Disturbance rate bound assumed by the DOBCBF (N/s).", GG_FIELD(s.dob_w1)));

    f.push_back(numbers("racbf.gamma", "Diagonal of the adaptation gain Gamma, [k, b].", GG_FIELD(s.racbf_gamma), 2));
    f.push_back(numbers("racbf.theta_min", "Lower corner of Theta, [k, b].", GG_FIELD(s.racbf_theta_min), 2));
    f.push_back(numbers("racbf.theta_max", "Upper corner of Theta, [k, b].", GG_FIELD(s.racbf_theta_max), 2));
    f.push_back(boolean("racbf.param_gradient",
                        "Use lambda = theta_hat - Gamma (dh/dtheta)'; false uses lambda = theta_hat.",
                        GG_FIELD(s.racbf_param_gradient)));

    f.push_back({"sensing.mode", "string", "\"tactile\" feeds filters the tactile estimate, \"truth\" the true wrench.",
                 [](Scenario& s, const ConfigValue& v, const std::string& w) {
                   const std::string m = as_string(v, w);
                   if (m == "tactile") {
                     s.sensing = SensingMode::tactile;
                   } else if (m == "truth") {
                     s.sensing = SensingMode::truth;
                   } else {
                     throw ConfigError(w + ": sensing.mode must be \"tactile\" or \"truth\"");
                   }
                 },
                 [](const Scenario& s) {
                   return std::string(s.sensing == SensingMode::tactile ? "\"tactile\"" : "\"truth\"");
                 }});
    f.push_back(number("sensing.noise_std", "Per-axis reading noise (sensor units).", GG_FIELD(s.tactile_noise)));
    f.push_back(number("sensing.kernel_width", "Spatial spread of a contact over the sensors (m).",
                       GG_FIELD(s.tactile_kernel)));
    f.push_back({"sensing.neighbors", "integer", "Neighbour count k of the estimator.",
                 [](Scenario& s, const ConfigValue& v, const std::string& w) {
                   s.tactile_neighbors = static_cast<int>(as_integer(v, w));
                 },
                 [](const Scenario& s) { return std::to_string(s.tactile_neighbors); }});
    f.push_back(numbers("sensing.slope", "Regression slope per axis (N per unit).", GG_FIELD(s.tactile_slope), 3));
    f.push_back(numbers("sensing.intercept", "Regression intercept per axis (N).", GG_FIELD(s.tactile_intercept), 3));

    f.push_back(numbers("finger.pinch_start", "Fingertip start of the pinch (m, finger plane).",
                        GG_FIELD(s.pinch_start), 2));
    f.push_back(numbers("finger.pinch_end", "Fingertip end of the pinch (m).", GG_FIELD(s.pinch_end), 2));
    f.push_back(numbers("finger.pinch_seed", "Joint seed for inverse kinematics (rad).", GG_FIELD(s.pinch_seed), 3));
    f.push_back(number("finger.pinch_duration", "Duration of the pinch motion (s).", GG_FIELD(s.pinch_duration)));
    f.push_back(number("finger.kp", "Joint PID proportional gain (rad per N m).", GG_FIELD(s.joint_kp)));
    f.push_back(number("finger.ki", "Joint PID integral gain.", GG_FIELD(s.joint_ki)));
    f.push_back(number("finger.kd", "Joint PID derivative gain.", GG_FIELD(s.joint_kd)));
    f.push_back(number("finger.integral_limit", "Anti-windup clamp on the integral (N m s).",
                       GG_FIELD(s.joint_integral_limit)));
    return f;
  }();
  return fields;
}

#undef GG_FIELD

}  // namespace

Scenario parse_scenario_unchecked(const std::string& text, const std::string& source) {
  const ConfigDocument doc = ConfigDocument::parse(text, source);
  Scenario s;
  std::vector<std::string> problems;
  for (const auto& [key, value] : doc.entries()) {
    const auto& fields = schema();
    const auto it = std::find_if(fields.begin(), fields.end(), [&](const Field& f) { return f.key == key; });
    const std::string where = doc.where(key) + " (" + key + ")";
    if (it == fields.end()) {
      problems.push_back(where + ": unknown key");
      continue;
    }
    try {
      it->apply(s, value, where);
    } catch (const ConfigError& e) {
      problems.push_back(e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid scenario";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ConfigError(msg);
  }
  return s;
}

Scenario parse_scenario(const std::string& text, const std::string& source) {
  Scenario s = parse_scenario_unchecked(text, source);
  const ValidationReport r = validate_scenario(s);
  if (!r.ok()) {
    std::string msg = source + ": scenario invariants violated";
    for (const auto& e : r.errors) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read scenario file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str(), path);
}

std::string scenario_reference_markdown() {
  const Scenario defaults;
  std::ostringstream out;
  out << "# Scenario file reference\n\n"
      << "Scenario files use a TOML subset: `[table]` headers, `key = value` lines, `#` comments, "
         "double-quoted strings, numbers (including `inf`), `true`/`false` and flat arrays. "
         "Unknown keys are rejected. Every key is optional; omitted keys take the default shown.\n\n"
      << "Schema version: " << kScenarioSchemaVersion << "\n\n"
      << "| key | type | default | meaning |\n|---|---|---|---|\n";
  for (const auto& f : schema())
    out << "| `" << f.key << "` | " << f.type << " | `" << f.show(defaults) << "` | " << f.doc << " |\n";
  return out.str();
}

std::string to_config_text(const Scenario& s) {
  std::ostringstream out;
  std::string table;
  for (const auto& f : schema()) {
    const auto dot = f.key.find('.');
    const std::string t = dot == std::string::npos ? "" : f.key.substr(0, dot);
    const std::string k = dot == std::string::npos ? f.key : f.key.substr(dot + 1);
    if (t != table) {
      out << "\n[" << t << "]\n";
      table = t;
    }
    out << k << " = " << f.show(s) << "\n";
  }
  return out.str();
}

}  // namespace graspguard
