#pragma once

#include <Eigen/Dense>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace graspguard {

inline constexpr int kSensorCount = 17;

/// Sensor layout on a hemispherical fingertip cap (fingertip frame, z along
/// the cap axis): apex plus rings of 8 at polar angles 30 and 60 degrees.
struct TactileGeometry {
  std::vector<Eigen::Vector3d> positions;
  double radius = 0.009;          // m
  double kernel_width = 0.0025;   // m, Gaussian spatial spread of a contact
  int neighbor_count = 4;         // k

  static TactileGeometry hemispherical_cap(double radius = 0.009, double kernel_width = 0.0025,
                                           int neighbor_count = 4);
  void validate() const;

  /// Point on the cap at the given polar / azimuth angles (rad).
  Eigen::Vector3d surface_point(double polar, double azimuth) const;
  bool on_surface(const Eigen::Vector3d& point, double tol = 1e-9) const;

  /// s_star followed by its k nearest sensors by position. Equidistant
  /// sensors (within 1e-9 relative) are ranked by strength, then index.
  std::vector<int> neighborhood(int s_star, const std::vector<double>& strength = {}) const;

  /// Mean distance from each sensor to its nearest neighbour.
  double mean_spacing() const;
};

/// force = slope .* deformation + intercept, per axis.
struct RegressionModel {
  Eigen::Vector3d slope = Eigen::Vector3d(0.02, 0.02, 0.05);
  Eigen::Vector3d intercept = Eigen::Vector3d::Zero();
  Eigen::Vector3d residual_rms = Eigen::Vector3d::Zero();

  void validate() const;
  Eigen::Vector3d to_force(const Eigen::Vector3d& deformation) const;
  Eigen::Vector3d to_deformation(const Eigen::Vector3d& force) const;
};

struct TactileArray {
  TactileGeometry geometry;
  std::vector<Eigen::Vector3d> readings;  // sensor units
  double noise_std = 0.0;

  /// Contact is declared when some reading magnitude exceeds 3 sigma.
  double threshold() const { return 3.0 * noise_std; }
};

/// Per-sensor kernel weights for a contact, scaled so their mean over the
/// estimator's neighbourhood of the strongest sensor is 1. With that scaling
/// the neighbourhood average of noiseless readings maps back to the force.
std::vector<double> kernel_weights(const Eigen::Vector3d& contact_point, const TactileGeometry& geometry);

/// reading_i = w_i * (force - intercept) ./ slope + N(0, noise_std^2) per axis.
/// rng may be null when noise_std is 0.
TactileArray synth_readings(const Eigen::Vector3d& contact_point, const Eigen::Vector3d& force,
                            const TactileGeometry& geometry, const RegressionModel& model,
                            double noise_std, std::mt19937_64* rng);

/// Least-squares line per axis. Throws ContractViolation on fewer than two
/// samples or constant deformation data.
RegressionModel fit_regression(const std::vector<Eigen::Vector3d>& deformation_samples,
                               const std::vector<Eigen::Vector3d>& force_samples);

struct ContactEstimate {
  Eigen::Vector3d p_cop = Eigen::Vector3d::Zero();
  Eigen::Vector3d f_c = Eigen::Vector3d::Zero();
  Eigen::Vector3d tau_c = Eigen::Vector3d::Zero();
  int s_star = -1;
  std::vector<int> support;     // S_o
  std::vector<double> weights;  // gamma, aligned with support
};

/// Center-of-pressure estimate. nullopt means no contact was detected.
std::optional<ContactEstimate> estimate_contact(const TactileArray& array, const RegressionModel& model);

struct CalibrationData {
  std::vector<double> t;
  std::vector<Eigen::Vector3d> deformation;
  std::vector<Eigen::Vector3d> force;
};

/// CSV with header t,deformation_x,deformation_y,deformation_z,force_x,force_y,force_z
/// (any column order). Throws ConfigError on a missing header, column or bad number.
CalibrationData read_calibration_csv(const std::string& path);
CalibrationData parse_calibration_csv(const std::string& text);

}  // namespace graspguard
