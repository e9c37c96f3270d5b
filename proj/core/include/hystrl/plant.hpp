#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

#include "hystrl/distributed_parameter.hpp"
#include "hystrl/fde_integrator.hpp"
#include "hystrl/operator_bank.hpp"

namespace hystrl {

using Signal = std::function<Eigen::VectorXd(double)>;
/// Maps (t, X) onto the state the operator bank is driven by.
using StateMap = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

struct LinearCore {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;

  [[nodiscard]] int states() const noexcept { return static_cast<int>(A.rows()); }
  [[nodiscard]] int inputs() const noexcept { return static_cast<int>(B.cols()); }
};

/// Largest real part of the eigenvalues of A.
[[nodiscard]] double spectral_abscissa(const Eigen::MatrixXd& a);
[[nodiscard]] bool is_hurwitz(const Eigen::MatrixXd& a);

/// A = [[0, I], [-G0, -G1]], B = [0; I]. Errc::not_hurwitz if A is not.
[[nodiscard]] LinearCore block_companion(const Eigen::MatrixXd& g0, const Eigen::MatrixXd& g1);

/// X' = A X + B((H X)(t) o mu + u(t)).
class GeneralPlant final : public HistoryRhs {
 public:
  GeneralPlant(LinearCore core, OperatorBank bank, DistributedParameter mu, Signal u = {},
               StateMap bank_state = {});

  [[nodiscard]] int dimension() const override { return core_.states(); }
  void start(double t0, const Eigen::VectorXd& x0) override;
  [[nodiscard]] Eigen::VectorXd evaluate(double t, const Eigen::VectorXd& x) override;
  void commit(double t, const Eigen::VectorXd& x) override;
  [[nodiscard]] Eigen::VectorXd input() const override { return last_u_; }

  [[nodiscard]] const LinearCore& core() const noexcept { return core_; }
  [[nodiscard]] const OperatorBank& bank() const noexcept { return bank_; }
  [[nodiscard]] const DistributedParameter& mu() const noexcept { return mu_; }
  /// (H X)(t) o mu at the last evaluation.
  [[nodiscard]] const Eigen::VectorXd& hysteresis_output() const noexcept { return last_y_; }

 private:
  [[nodiscard]] Eigen::VectorXd bank_state(double t, const Eigen::VectorXd& x) const;

  LinearCore core_;
  OperatorBank bank_;
  DistributedParameter mu_;
  Signal u_;
  StateMap map_;
  Eigen::VectorXd last_u_;
  Eigen::VectorXd last_y_;
};

/// M(q) q'' + C(q, q') q' + dV/dq = Q_a + tau with Q_a = aero_map(q) (h a(X)) o mu.
struct RoboticForm {
  int dof = 0;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> mass;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> coriolis;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> potential_gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> aero_map;

  /// q'' for given forcing.
  [[nodiscard]] Eigen::VectorXd acceleration(const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                             const Eigen::VectorXd& generalized_force) const;
};

struct Reference {
  Signal q;
  Signal qd;
  Signal qdd;
};

/// First-order core on X = [q; q'] (regulator) or [e; e'] with e = q - q_d
/// (tracking), and the pieces needed to drive it.
struct FeedbackTransform {
  LinearCore core;
  /// tau(t, q, q', u) that turns the robotic form into X' = AX + B(b(X) h + u).
  std::function<Eigen::VectorXd(double, const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&)> tau;
  /// b = M(q)^{-1} aero_map(q), evaluated on the physical state [q; q'].
  Mixer mixer;
  /// (t, X) -> [q; q'].
  StateMap physical;
};

[[nodiscard]] FeedbackTransform regulator_transform(const RoboticForm& robotic, const Eigen::MatrixXd& g0,
                                                    const Eigen::MatrixXd& g1);
[[nodiscard]] FeedbackTransform tracking_transform(const RoboticForm& robotic, Reference reference,
                                                   const Eigen::MatrixXd& g0, const Eigen::MatrixXd& g1);

/// The robotic form integrated directly in [q; q'] under a given tau(t, q, q').
class RoboticPlant final : public HistoryRhs {
 public:
  using Torque = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&, const Eigen::VectorXd&)>;
  RoboticPlant(RoboticForm robotic, OperatorBank bank, DistributedParameter mu, Torque tau);

  [[nodiscard]] int dimension() const override { return 2 * robotic_.dof; }
  void start(double t0, const Eigen::VectorXd& x0) override;
  [[nodiscard]] Eigen::VectorXd evaluate(double t, const Eigen::VectorXd& x) override;
  void commit(double t, const Eigen::VectorXd& x) override;
  [[nodiscard]] Eigen::VectorXd input() const override { return last_tau_; }

 private:
  RoboticForm robotic_;
  OperatorBank bank_;
  DistributedParameter mu_;
  Torque tau_;
  Eigen::VectorXd last_tau_;
};

struct ContractionConstants {
  double m_a = 0.0;
  double m_mu = 0.0;
  double m_h = 0.0;
  double m_u = 0.0;
  double lipschitz = 0.0;
  double radius = 1.0;
  double window = 1.0;
};

struct ContractionEstimate {
  ContractionConstants constants;
  double norm_a = 0.0;
  double norm_b = 0.0;
  double delta = 0.0;
};

/// delta = 0.99 min{h, r / ((|A| + |B| M_mu L) r + M_A + |B| M_T), 1 / (|A| + |B| M_mu L)},
/// M_T = M_H + M_u, spectral norms.
[[nodiscard]] ContractionEstimate contraction_horizon(const LinearCore& core, const ContractionConstants& c);

}  // namespace hystrl
