#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hystrl/fde_integrator.hpp"

namespace hystrl {

/// u'(x) = 1 - 2 u(x) - 5 int_0^x u(t) dt, u(0) = 0.
///
/// The history integral is carried as committed running sums; the newest
/// piece is integrated exactly over the cubic through the last four nodes
/// (fewer while the history is short), so the quadrature does not cap the
/// order of a fourth-order integrator.
class IntegroBenchmark final : public HistoryRhs {
 public:
  [[nodiscard]] int dimension() const override { return 1; }
  void start(double t0, const Eigen::VectorXd& x0) override;
  [[nodiscard]] Eigen::VectorXd evaluate(double t, const Eigen::VectorXd& x) override;
  void commit(double t, const Eigen::VectorXd& x) override;

  /// int_0^t u at the last committed node.
  [[nodiscard]] double committed_integral() const noexcept { return integrals_.empty() ? 0.0 : integrals_.back(); }

  /// Closed form (1/2) e^{-x} sin 2x.
  [[nodiscard]] static double exact(double x);
  /// int_0^x of the closed form.
  [[nodiscard]] static double exact_integral(double x);

 private:
  [[nodiscard]] double integral_to(double t, double u) const;

  std::vector<double> times_;
  std::vector<double> values_;
  std::vector<double> integrals_;
};

}  // namespace hystrl
