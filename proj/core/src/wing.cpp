#include "hystrl/wing.hpp"

#include <cmath>
#include <string>

#include "hystrl/error.hpp"

namespace hystrl {

void WingParams::validate() const {
  if (!(m > 0.0) || !(I_theta > 0.0)) throw Error(Errc::invalid_argument, "wing mass and inertia must be positive");
  if (k_h < 0 || k_theta < 0 || c_h < 0 || c_theta < 0) {
    throw Error(Errc::invalid_argument, "wing stiffness and damping must be nonnegative");
  }
  if (std::abs(flap_effectiveness.determinant()) < 1e-12) {
    throw Error(Errc::invalid_argument, "flap effectiveness map is singular");
  }
}

Eigen::Matrix2d wing_mass(const WingParams& p, WingMode mode, double theta) {
  const double c = mode == WingMode::full ? std::cos(theta) : 1.0;
  Eigen::Matrix2d mass;
  mass << p.m, p.m * p.x_theta * c, p.m * p.x_theta * c, p.m * p.x_theta * p.x_theta + p.I_theta;
  return mass;
}

RoboticForm wing_model(const WingParams& params, WingMode mode) {
  params.validate();
  const WingParams p = params;
  RoboticForm r;
  r.dof = 2;
  r.mass = [p, mode](const Eigen::VectorXd& q) -> Eigen::MatrixXd { return wing_mass(p, mode, q[1]); };
  r.coriolis = [p, mode](const Eigen::VectorXd& q, const Eigen::VectorXd& qd) -> Eigen::MatrixXd {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(2, 2);
    c(0, 0) = p.c_h;
    c(1, 1) = p.c_theta;
    if (mode == WingMode::full) c(0, 1) -= p.m * p.x_theta * qd[1] * std::sin(q[1]);
    return c;
  };
  r.potential_gradient = [p, mode](const Eigen::VectorXd& q) -> Eigen::VectorXd {
    Eigen::VectorXd dv(2);
    dv << p.k_h * q[0], p.k_theta * q[1];
    if (mode == WingMode::full && p.gravity) {
      dv[0] += p.m * p.g;
      dv[1] += p.m * p.g * p.x_theta * std::cos(q[1]);
    }
    return dv;
  };
  r.aero_map = [p, mode](const Eigen::VectorXd& q) -> Eigen::MatrixXd {
    Eigen::MatrixXd map(2, 1);
    if (mode == WingMode::full) {
      map << std::cos(q[1]), p.x_a;
    } else {
      map << 1.0, 0.0;
    }
    return map;
  };
  return r;
}

double wing_energy(const WingParams& p, WingMode mode, const Eigen::Vector2d& q, const Eigen::Vector2d& qd) {
  const double kinetic = 0.5 * qd.dot(wing_mass(p, mode, q[1]) * qd);
  double potential = 0.5 * p.k_h * q[0] * q[0] + 0.5 * p.k_theta * q[1] * q[1];
  if (mode == WingMode::full && p.gravity) potential += p.m * p.g * (q[0] + p.x_theta * std::sin(q[1]));
  return kinetic + potential;
}

Eigen::Vector2d flap_forcing(const WingParams& p, const Eigen::Vector2d& beta) { return p.flap_effectiveness * beta; }

Eigen::Vector2d flap_angles(const WingParams& p, const Eigen::Vector2d& tau) {
  return p.flap_effectiveness.partialPivLu().solve(tau);
}

Scalarizer pitch_scalarizer() { return Scalarizer::coordinate(1); }

std::string_view to_string(WingMode mode) noexcept {
  return mode == WingMode::full ? "full" : "simplified";
}

WingMode wing_mode_from_string(std::string_view name) {
  if (name == "simplified") return WingMode::simplified;
  if (name == "full") return WingMode::full;
  throw Error(Errc::invalid_argument, "unknown wing mode '" + std::string(name) + "'");
}

}  // namespace hystrl
