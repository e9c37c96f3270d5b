#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "hystrl/distributed_parameter.hpp"
#include "hystrl/fde_integrator.hpp"
#include "hystrl/lyapunov.hpp"
#include "hystrl/operator_bank.hpp"
#include "hystrl/plant.hpp"

namespace hystrl {

struct SlidingConfig {
  double k = 20.0;
  double epsilon = 0.01;
  int level = 3;

  void validate() const;
};

/// v = -k s / |s| when |s| >= eps, -(k / eps) s otherwise, s = B^T P X.
[[nodiscard]] Eigen::VectorXd sliding_control(const Eigen::VectorXd& x, const LyapunovPair& pair,
                                              const Eigen::MatrixXd& b, const SlidingConfig& cfg);

/// Closed loop on z = (X, mu_hat values):
///   u = v - (H_n X) o mu_hat,  X' = A X + B((H X) o mu* + u),
///   mu_hat' = g ((H_n X))^* B^T P X.
/// Both banks read `physical(t, X)`.
class ClosedLoopSystem final : public HistoryRhs {
 public:
  ClosedLoopSystem(LinearCore core, StateMap physical, OperatorBank plant_bank, DistributedParameter mu_star,
                   OperatorBank control_bank, LyapunovPair pair, SlidingConfig cfg, double adaptation_gain = 1.0);

  [[nodiscard]] int dimension() const override;
  void start(double t0, const Eigen::VectorXd& z0) override;
  [[nodiscard]] Eigen::VectorXd evaluate(double t, const Eigen::VectorXd& z) override;
  void commit(double t, const Eigen::VectorXd& z) override;
  /// The sliding term v at the last evaluation.
  [[nodiscard]] Eigen::VectorXd input() const override { return last_v_; }

  [[nodiscard]] Eigen::VectorXd pack(const Eigen::VectorXd& x, const DistributedParameter& mu_hat) const;
  [[nodiscard]] Eigen::VectorXd x(const Eigen::VectorXd& z) const { return z.head(core_.states()); }
  [[nodiscard]] DistributedParameter mu_hat(const Eigen::VectorXd& z) const;

  /// d = (H X) o mu* - (H_n X) o Pi^n mu* at the committed time.
  [[nodiscard]] Eigen::VectorXd residual() const;
  /// V = X^T P X / 2 + |Pi^n mu* - mu_hat|^2 / (2 g).
  [[nodiscard]] double lyapunov_value(const Eigen::VectorXd& z) const;

  [[nodiscard]] const LinearCore& core() const noexcept { return core_; }
  [[nodiscard]] const LyapunovPair& pair() const noexcept { return pair_; }
  [[nodiscard]] const SlidingConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] const DistributedParameter& projected_mu_star() const noexcept { return mu_star_n_; }

 private:
  LinearCore core_;
  StateMap physical_;
  OperatorBank plant_bank_;
  DistributedParameter mu_star_;
  DistributedParameter mu_star_n_;
  OperatorBank control_bank_;
  LyapunovPair pair_;
  SlidingConfig cfg_;
  double gain_;
  Eigen::VectorXd last_v_;
};

struct ClosedLoopOptions {
  PcScheme scheme = PcScheme::adams(4);
  double step = 0.0005;
  double horizon = 10.0;
  double tail_fraction = 0.2;
  double chatter_threshold = 20.0;   ///< sign changes per second
  double dissipation_slack = 0.0;    ///< c in V' <= -X^T Q X / 2 + eps k + c t_h
};

struct ClosedLoopMetrics {
  double tail_sup = 0.0;             ///< sup of |X| over the tail window
  double ultimate_constant = 0.0;    ///< tail_sup / eps
  double chatter_rate = 0.0;         ///< max over components of sign changes per second in the tail
  bool chattering = false;
  double dissipation_violation_rate = 0.0;
  double residual_sup = 0.0;         ///< sup_t |d(t)|
  double final_x_norm = 0.0;
  double final_mu_tilde_norm = 0.0;
};

struct ClosedLoopRecord {
  Trajectory trajectory;             ///< X and v per node
  std::vector<double> lyapunov;
  std::vector<double> residual_norm;
  DistributedParameter final_mu_hat;
  ClosedLoopMetrics metrics;
};

[[nodiscard]] ClosedLoopRecord closed_loop(ClosedLoopSystem& system, const Eigen::VectorXd& x0,
                                           const DistributedParameter& mu_hat0, const ClosedLoopOptions& options);

/// Sign changes per unit time of each column of `signals` over [t_from, end].
[[nodiscard]] double chatter_rate(const std::vector<double>& times, const std::vector<Eigen::VectorXd>& signals,
                                  double t_from);

/// Rows t, x1..xm, v1..vq, V, |d|.
void write_csv(std::ostream& out, const ClosedLoopRecord& record);

}  // namespace hystrl
