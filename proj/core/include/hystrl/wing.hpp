#pragma once

#include <Eigen/Dense>
#include <string_view>

#include "hystrl/plant.hpp"

namespace hystrl {

enum class WingMode { simplified, full };

/// Pitch-plunge wing section, q = (h, theta).
struct WingParams {
  double m = 1.0;
  double x_theta = 0.2;
  double I_theta = 0.25;
  double k_h = 1.0;
  double k_theta = 2.0;
  double c_h = 0.1;
  double c_theta = 0.1;
  double x_a = 0.0;        ///< lift moment arm, full mode only
  bool gravity = false;    ///< full mode only
  double g = 9.81;
  /// (f1, f2) = E (beta1, beta2).
  Eigen::Matrix2d flap_effectiveness = (Eigen::Matrix2d() << 1.0, 0.5, -0.3, 1.0).finished();

  /// Errc::invalid_argument for nonpositive m or I_theta, negative
  /// stiffness/damping, or a singular flap map.
  void validate() const;
};

/// Simplified: constant mass matrix, diagonal damping and stiffness, lift
/// entering the plunge equation only. Full: configuration-dependent mass
/// matrix, the velocity coupling term, lift (L cos theta, x_a L), optional
/// gravity. Damping, when nonzero, is added to C in both modes.
[[nodiscard]] RoboticForm wing_model(const WingParams& params, WingMode mode);

[[nodiscard]] Eigen::Matrix2d wing_mass(const WingParams& params, WingMode mode, double theta);
/// Kinetic plus potential energy.
[[nodiscard]] double wing_energy(const WingParams& params, WingMode mode, const Eigen::Vector2d& q,
                                 const Eigen::Vector2d& qd);

[[nodiscard]] Eigen::Vector2d flap_forcing(const WingParams& params, const Eigen::Vector2d& beta);
[[nodiscard]] Eigen::Vector2d flap_angles(const WingParams& params, const Eigen::Vector2d& tau);

/// a(X) = theta on X = (h, theta, h', theta').
[[nodiscard]] Scalarizer pitch_scalarizer();

[[nodiscard]] std::string_view to_string(WingMode mode) noexcept;
[[nodiscard]] WingMode wing_mode_from_string(std::string_view name);

}  // namespace hystrl
