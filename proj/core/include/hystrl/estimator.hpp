#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "hystrl/distributed_parameter.hpp"
#include "hystrl/fde_integrator.hpp"
#include "hystrl/operator_bank.hpp"
#include "hystrl/plant.hpp"

namespace hystrl {

/// State fed to the adjoint in the parameter update.
///   error:    mu_hat' =  g (B W)^* (X - X_hat)
///   estimate: mu_hat' = -g (B W)^* X_hat
///   measured: mu_hat' = -g (B W)^* X
/// Only the error form makes d/dt (|X~|^2 + |mu~|^2 / g) / 2 = X~^T A X~.
enum class UpdateState { error, estimate, measured };

[[nodiscard]] std::string_view to_string(UpdateState s) noexcept;
[[nodiscard]] UpdateState update_state_from_string(std::string_view name);

struct EstimatorOptions {
  UpdateState state = UpdateState::error;
  double gain = 1.0;
  /// Optional symmetric weight W applied before B^T (B^T W z); empty means I.
  /// With W = P from A^T P + P A = -Q the error form gives
  /// d/dt (X~^T P X~ + |mu~|^2 / g) / 2 = -X~^T Q X~ / 2.
  Eigen::MatrixXd weight;
};

struct EstimatorDerivative {
  Eigen::VectorXd x_hat_dot;
  DistributedParameter mu_hat_dot;
};

/// X_hat' = A X_hat + B((H X) o mu_hat + u) and the selected update law. The
/// bank must already sit at the measured state X.
[[nodiscard]] EstimatorDerivative estimator_rhs(const LinearCore& core, const OperatorBank& bank,
                                                const Eigen::VectorXd& x, const Eigen::VectorXd& x_hat,
                                                const DistributedParameter& mu_hat, const Eigen::VectorXd& u,
                                                const EstimatorOptions& options);

/// Plant and estimator integrated together on z = (X, X_hat, mu_hat values).
class IdentificationSystem final : public HistoryRhs {
 public:
  IdentificationSystem(LinearCore core, OperatorBank plant_bank, DistributedParameter mu_star,
                       OperatorBank estimator_bank, Signal u, EstimatorOptions options);

  [[nodiscard]] int dimension() const override;
  void start(double t0, const Eigen::VectorXd& z0) override;
  [[nodiscard]] Eigen::VectorXd evaluate(double t, const Eigen::VectorXd& z) override;
  void commit(double t, const Eigen::VectorXd& z) override;
  [[nodiscard]] Eigen::VectorXd input() const override { return last_u_; }

  [[nodiscard]] Eigen::VectorXd pack(const Eigen::VectorXd& x, const Eigen::VectorXd& x_hat,
                                     const DistributedParameter& mu_hat) const;
  [[nodiscard]] Eigen::VectorXd x(const Eigen::VectorXd& z) const { return z.head(m_); }
  [[nodiscard]] Eigen::VectorXd x_hat(const Eigen::VectorXd& z) const { return z.segment(m_, m_); }
  [[nodiscard]] DistributedParameter mu_hat(const Eigen::VectorXd& z) const;

  /// Output mismatch |(H X) o mu* - (H_j X) o mu_hat| at the committed time.
  [[nodiscard]] double output_mismatch(const Eigen::VectorXd& z) const;

  [[nodiscard]] const OperatorBank& plant_bank() const noexcept { return plant_bank_; }
  [[nodiscard]] const OperatorBank& estimator_bank() const noexcept { return estimator_bank_; }
  [[nodiscard]] const DistributedParameter& mu_star() const noexcept { return mu_star_; }

 private:
  LinearCore core_;
  OperatorBank plant_bank_;
  DistributedParameter mu_star_;
  OperatorBank estimator_bank_;
  Signal u_;
  EstimatorOptions options_;
  int m_ = 0;
  Eigen::VectorXd last_u_;
};

/// L^2 distance of two parameters that may sit on different levels.
[[nodiscard]] double parameter_distance(const DistributedParameter& a, const DistributedParameter& b);

struct IdentifyRecord {
  Trajectory trajectory;  ///< full z = (X, X_hat, mu_hat)
  std::vector<double> x_tilde_norm;
  std::vector<double> output_mismatch;
  std::vector<double> mu_tilde_norm;
  std::vector<Eigen::VectorXd> x_hat;
  DistributedParameter final_mu_hat;
  int estimator_level = 0;
};

struct IdentifyOptions {
  PcScheme scheme = PcScheme::adams(4);
  double step = 0.005;
  double horizon = 40.0;
  /// Store full z in the trajectory (mu_hat included); off keeps memory small.
  bool keep_parameters = false;
};

/// Co-integrates plant and estimator from X(0) = x0, X_hat(0) = x_hat0, mu_hat(0) = mu_hat0.
[[nodiscard]] IdentifyRecord identify(IdentificationSystem& system, const Eigen::VectorXd& x0,
                                      const Eigen::VectorXd& x_hat0, const DistributedParameter& mu_hat0,
                                      const IdentifyOptions& options);

/// Rows t, |X~|, mismatch, |mu~|.
void write_csv(std::ostream& out, const IdentifyRecord& record);

}  // namespace hystrl
