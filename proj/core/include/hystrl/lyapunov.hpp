#pragma once

#include <Eigen/Dense>

namespace hystrl {

struct LyapunovPair {
  Eigen::MatrixXd Q;
  Eigen::MatrixXd P;
};

/// Solves A^T P + P A = -Q for symmetric P. Errc::not_hurwitz if A is not
/// Hurwitz, Errc::invalid_argument if Q is not symmetric positive definite,
/// Errc::singular_system if the linear system is numerically singular.
[[nodiscard]] LyapunovPair lyapunov_solve(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);

/// max |A^T P + P A + Q|.
[[nodiscard]] double lyapunov_residual(const Eigen::MatrixXd& a, const LyapunovPair& pair);

[[nodiscard]] bool is_spd(const Eigen::MatrixXd& m);

}  // namespace hystrl
