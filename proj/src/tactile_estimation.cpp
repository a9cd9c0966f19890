#include "graspguard/tactile_estimation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "graspguard/error.hpp"

namespace graspguard {

TactileGeometry TactileGeometry::hemispherical_cap(double radius, double kernel_width, int neighbor_count) {
  TactileGeometry g;
  g.radius = radius;
  g.kernel_width = kernel_width;
  g.neighbor_count = neighbor_count;
  g.positions.push_back(g.surface_point(0.0, 0.0));
  for (double polar_deg : {30.0, 60.0}) {
    for (int j = 0; j < 8; ++j) {
      g.positions.push_back(g.surface_point(polar_deg * std::numbers::pi / 180.0, j * std::numbers::pi / 4.0));
    }
  }
  g.validate();
  return g;
}

void TactileGeometry::validate() const {
  require(static_cast<int>(positions.size()) == kSensorCount, "TactileGeometry: exactly 17 sensors expected");
  require(neighbor_count >= 1 && neighbor_count <= kSensorCount - 1, "TactileGeometry: neighbor_count must be in 1..16");
  require(radius > 0.0, "TactileGeometry: radius must be > 0");
  require(kernel_width >= 0.0, "TactileGeometry: kernel_width must be >= 0");
}

Eigen::Vector3d TactileGeometry::surface_point(double polar, double azimuth) const {
  return radius * Eigen::Vector3d(std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth),
                                  std::cos(polar));
}

bool TactileGeometry::on_surface(const Eigen::Vector3d& point, double tol) const {
  return std::abs(point.norm() - radius) <= tol * std::max(1.0, radius) && point.z() >= -tol;
}

std::vector<int> TactileGeometry::neighborhood(int s_star, const std::vector<double>& strength) const {
  require(s_star >= 0 && s_star < static_cast<int>(positions.size()), "neighborhood: sensor index out of range");
  require(strength.empty() || strength.size() == positions.size(), "neighborhood: one strength per sensor expected");
  std::vector<int> others;
  for (int i = 0; i < static_cast<int>(positions.size()); ++i)
    if (i != s_star) others.push_back(i);
  const Eigen::Vector3d& c = positions[static_cast<std::size_t>(s_star)];
  // the apex has 8 equidistant neighbours; index order would always pick the same side
  std::stable_sort(others.begin(), others.end(), [&](int a, int b) {
    const double da = (positions[static_cast<std::size_t>(a)] - c).norm();
    const double db = (positions[static_cast<std::size_t>(b)] - c).norm();
    if (std::abs(da - db) > 1e-9 * std::max(da, db)) return da < db;
    if (strength.empty()) return false;
    return strength[static_cast<std::size_t>(a)] > strength[static_cast<std::size_t>(b)];
  });
  std::vector<int> out{s_star};
  out.insert(out.end(), others.begin(), others.begin() + neighbor_count);
  return out;
}

double TactileGeometry::mean_spacing() const {
  double total = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < positions.size(); ++j)
      if (i != j) best = std::min(best, (positions[i] - positions[j]).norm());
    total += best;
  }
  return total / static_cast<double>(positions.size());
}

void RegressionModel::validate() const {
  require(slope.allFinite() && intercept.allFinite(), "RegressionModel: non-finite coefficients");
  require(slope.z() != 0.0, "RegressionModel: normal-axis slope must be nonzero");
}

Eigen::Vector3d RegressionModel::to_force(const Eigen::Vector3d& deformation) const {
  return slope.cwiseProduct(deformation) + intercept;
}

Eigen::Vector3d RegressionModel::to_deformation(const Eigen::Vector3d& force) const {
  require((slope.array() != 0.0).all(), "RegressionModel: every slope must be nonzero to invert");
  return (force - intercept).cwiseQuotient(slope);
}

namespace {

// lowest index within rounding of the max, so that readings and the weights
// they were synthesized from agree on s_star when two sensors tie
int strongest(const std::vector<double>& v) {
  const double top = *std::max_element(v.begin(), v.end());
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] >= top - 1e-12 * std::abs(top)) return static_cast<int>(i);
  return 0;
}

}  // namespace

std::vector<double> kernel_weights(const Eigen::Vector3d& contact_point, const TactileGeometry& geometry) {
  geometry.validate();
  const std::size_t n = geometry.positions.size();
  std::vector<double> w(n, 0.0);
  const double s = geometry.kernel_width;
  for (std::size_t i = 0; i < n; ++i) {
    const double d2 = (geometry.positions[i] - contact_point).squaredNorm();
    if (s > 0.0) {
      w[i] = std::exp(-d2 / (2.0 * s * s));
    } else {
      w[i] = d2 <= 1e-24 ? 1.0 : 0.0;
    }
  }
  const int s_star = strongest(w);
  double norm = 0.0;
  const std::vector<int> support = geometry.neighborhood(s_star, w);
  for (int j : support) norm += w[static_cast<std::size_t>(j)];
  norm /= static_cast<double>(support.size());
  if (norm > 0.0)
    for (double& x : w) x /= norm;
  return w;
}

TactileArray synth_readings(const Eigen::Vector3d& contact_point, const Eigen::Vector3d& force,
                            const TactileGeometry& geometry, const RegressionModel& model,
                            double noise_std, std::mt19937_64* rng) {
  require(geometry.on_surface(contact_point, 1e-6), "synth_readings: contact point not on the fingertip surface");
  require(noise_std >= 0.0, "synth_readings: noise_std must be >= 0");
  require(noise_std == 0.0 || rng != nullptr, "synth_readings: an RNG is required when noise_std > 0");
  model.validate();

  TactileArray array;
  array.geometry = geometry;
  array.noise_std = noise_std;
  const std::vector<double> w = kernel_weights(contact_point, geometry);
  const Eigen::Vector3d base = model.to_deformation(force);
  std::normal_distribution<double> noise(0.0, noise_std > 0.0 ? noise_std : 1.0);
  array.readings.reserve(w.size());
  for (double wi : w) {
    Eigen::Vector3d r = wi * base;
    if (noise_std > 0.0)
      for (int a = 0; a < 3; ++a) r[a] += noise(*rng);
    array.readings.push_back(r);
  }
  return array;
}

RegressionModel fit_regression(const std::vector<Eigen::Vector3d>& deformation_samples,
                               const std::vector<Eigen::Vector3d>& force_samples) {
  require(deformation_samples.size() == force_samples.size(), "fit_regression: sample counts differ");
  const std::size_t n = deformation_samples.size();
  require(n >= 2, "fit_regression: need at least two samples");
  RegressionModel model;
  for (int a = 0; a < 3; ++a) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += deformation_samples[i][a];
      my += force_samples[i][a];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = deformation_samples[i][a] - mx;
      sxx += dx * dx;
      sxy += dx * (force_samples[i][a] - my);
      scale = std::max(scale, std::abs(deformation_samples[i][a]));
    }
    if (!(sxx > 1e-24 * std::max(1.0, scale * scale) * static_cast<double>(n)))
      throw ContractViolation("fit_regression: deformation data on axis " + std::to_string(a) + " is constant");
    model.slope[a] = sxy / sxx;
    model.intercept[a] = my - model.slope[a] * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = force_samples[i][a] - (model.slope[a] * deformation_samples[i][a] + model.intercept[a]);
      ss += r * r;
    }
    model.residual_rms[a] = std::sqrt(ss / static_cast<double>(n));
  }
  return model;
}

std::optional<ContactEstimate> estimate_contact(const TactileArray& array, const RegressionModel& model) {
  array.geometry.validate();
  model.validate();
  require(array.readings.size() == array.geometry.positions.size(), "estimate_contact: one reading per sensor expected");

  std::vector<double> mag(array.readings.size());
  for (std::size_t i = 0; i < mag.size(); ++i) mag[i] = array.readings[i].norm();
  const int s_star = strongest(mag);
  if (!(mag[static_cast<std::size_t>(s_star)] > array.threshold())) return std::nullopt;

  ContactEstimate est;
  est.s_star = s_star;
  est.support = array.geometry.neighborhood(s_star, mag);
  double total = 0.0;
  for (int j : est.support) total += mag[static_cast<std::size_t>(j)];
  Eigen::Vector3d mean_reading = Eigen::Vector3d::Zero();
  for (int j : est.support) {
    const auto idx = static_cast<std::size_t>(j);
    const double gamma = mag[idx] / total;
    est.weights.push_back(gamma);
    est.p_cop += gamma * array.geometry.positions[idx];
    mean_reading += array.readings[idx];
  }
  mean_reading /= static_cast<double>(est.support.size());
  est.f_c = model.to_force(mean_reading);
  est.tau_c = est.p_cop.cross(est.f_c);
  return est;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("calibration CSV line " + std::to_string(line_no) + ": '" + s + "' is not a number");
  return v;
}

}  // namespace

CalibrationData parse_calibration_csv(const std::string& text) {
  static const std::vector<std::string> kColumns{"t",       "deformation_x", "deformation_y", "deformation_z",
                                                 "force_x", "force_y",       "force_z"};
  std::stringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> index;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto header = split_csv_line(line);
    for (std::size_t i = 0; i < header.size(); ++i) index[header[i]] = i;
    break;
  }
  if (index.empty()) throw ConfigError("calibration CSV: missing header row");
  for (const auto& c : kColumns)
    if (!index.count(c)) throw ConfigError("calibration CSV: header lacks column '" + c + "'");

  CalibrationData data;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < index.size())
      throw ConfigError("calibration CSV line " + std::to_string(line_no) + ": expected " +
                        std::to_string(index.size()) + " cells");
    auto at = [&](const std::string& c) { return parse_number(cells[index.at(c)], line_no); };
    data.t.push_back(at("t"));
    data.deformation.emplace_back(at("deformation_x"), at("deformation_y"), at("deformation_z"));
    data.force.emplace_back(at("force_x"), at("force_y"), at("force_z"));
  }
  return data;
}

CalibrationData read_calibration_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open calibration file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_calibration_csv(ss.str());
}

}  // namespace graspguard
