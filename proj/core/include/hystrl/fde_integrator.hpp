#pragma once

#include <Eigen/Dense>
#include <deque>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

namespace hystrl {

/// Append-only record of X(t_n) and u(t_n) on a uniform grid.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(double step) : step_(step) {}

  void append(double t, Eigen::VectorXd x, Eigen::VectorXd u = {});

  [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
  [[nodiscard]] bool empty() const noexcept { return times_.empty(); }
  [[nodiscard]] double step() const noexcept { return step_; }
  [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }
  [[nodiscard]] const std::vector<Eigen::VectorXd>& states() const noexcept { return states_; }
  [[nodiscard]] const std::vector<Eigen::VectorXd>& inputs() const noexcept { return inputs_; }
  [[nodiscard]] const Eigen::VectorXd& state(std::size_t n) const { return states_.at(n); }
  [[nodiscard]] const Eigen::VectorXd& back() const { return states_.back(); }
  /// Linear interpolation between nodes; Errc::time_out_of_range outside.
  [[nodiscard]] Eigen::VectorXd state_at(double t) const;

 private:
  double step_ = 0.0;
  std::vector<double> times_;
  std::vector<Eigen::VectorXd> states_;
  std::vector<Eigen::VectorXd> inputs_;
};

/// Columns t, x1..xm, u1..uq.
void write_csv(std::ostream& out, const Trajectory& traj);

/// Right-hand side that may read the whole committed history.
///
/// evaluate() is provisional: it may look at the segment from the last
/// committed node to (t, x) but must leave committed memory untouched, so
/// calling it twice with the same arguments gives the same answer. commit()
/// makes (t, x) part of the history.
class HistoryRhs {
 public:
  virtual ~HistoryRhs() = default;

  [[nodiscard]] virtual int dimension() const = 0;
  virtual void start(double t0, const Eigen::VectorXd& x0) = 0;
  [[nodiscard]] virtual Eigen::VectorXd evaluate(double t, const Eigen::VectorXd& x) = 0;
  virtual void commit(double t, const Eigen::VectorXd& x) = 0;
  /// Exogenous/control input at the last evaluation, recorded into the trajectory.
  [[nodiscard]] virtual Eigen::VectorXd input() const { return {}; }
};

/// Memoryless F(t, x).
class FunctionRhs final : public HistoryRhs {
 public:
  using Fn = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;
  FunctionRhs(int dim, Fn fn) : dim_(dim), fn_(std::move(fn)) {}

  [[nodiscard]] int dimension() const override { return dim_; }
  void start(double, const Eigen::VectorXd&) override {}
  [[nodiscard]] Eigen::VectorXd evaluate(double t, const Eigen::VectorXd& x) override { return fn_(t, x); }
  void commit(double, const Eigen::VectorXd&) override {}

 private:
  int dim_;
  Fn fn_;
};

/// Adams predictor-corrector pair of order p in {1, 2, 4}, run in PECE mode.
///
/// p = 1: Euler / backward Euler. p = 2: AB2 / trapezoid. p = 4: AB4 / AM4.
/// Before p - 1 past derivatives exist the orders ramp up (AB1 + AM2, then
/// AB2 + AM3, then AB3 + AM4). For p = 4 those first p - 1 steps run on a
/// sub-grid of h / startup_substeps so the low-order start does not leak
/// into the global error.
struct PcScheme {
  int order = 4;
  int startup_substeps = 16;

  static PcScheme adams(int p);
  /// Adams-Bashforth weights on F_n, F_{n-1}, ... for `steps` past values.
  [[nodiscard]] static std::vector<double> bashforth(int steps);
  /// Adams-Moulton weights on F_{n+1}, F_n, ... of order `q` (q - 1 past values).
  [[nodiscard]] static std::vector<double> moulton(int q);
};

class PredictorCorrector {
 public:
  PredictorCorrector(HistoryRhs& rhs, PcScheme scheme, double step);

  /// Commits X(t0) and records node 0.
  void start(double t0, const Eigen::VectorXd& x0, Trajectory& traj);
  void start(double t0, const Eigen::VectorXd& x0);
  /// Adds one node; Errc::nan_detected on a non-finite state.
  void step(Trajectory& traj);
  /// Same without recording; returns the new state.
  const Eigen::VectorXd& advance();

  [[nodiscard]] const Eigen::VectorXd& state() const noexcept { return x_; }

  [[nodiscard]] double time() const noexcept { return t_; }
  [[nodiscard]] std::size_t steps_taken() const noexcept { return steps_; }

 private:
  struct Ladder {
    double h = 0.0;
    int count = 0;                        // PECE steps taken on this grid
    std::deque<Eigen::VectorXd> derivs;   // F_n, F_{n-1}, ...
  };

  Eigen::VectorXd pece(Ladder& ladder, double t, const Eigen::VectorXd& x);

  HistoryRhs& rhs_;
  PcScheme scheme_;
  double h_;
  double t0_ = 0.0;
  double t_ = 0.0;
  std::size_t steps_ = 0;
  Eigen::VectorXd x_;
  Ladder main_;
  Ladder startup_;
};

/// Runs round(T / t_h) steps from X0. Errc::invalid_argument unless T > 0 and
/// t_h divides T to within rounding.
[[nodiscard]] Trajectory integrate(const Eigen::VectorXd& x0, HistoryRhs& rhs, const PcScheme& scheme,
                                   double step, double horizon, double t0 = 0.0);

struct OrderCheck {
  std::vector<double> steps;
  std::vector<double> errors;
  double slope = 0.0;
  bool exact = false;  ///< every error at rounding level; slope meaningless
};

/// Global error at T, measured in the max norm against `exact(T)`, for each
/// step size; the slope is fitted in log-log.
[[nodiscard]] OrderCheck order_check(const std::function<std::unique_ptr<HistoryRhs>()>& make_rhs,
                                     const Eigen::VectorXd& x0,
                                     const std::function<Eigen::VectorXd(double)>& exact,
                                     const PcScheme& scheme, const std::vector<double>& steps,
                                     double horizon, double exact_tol = 1e-13);

}  // namespace hystrl
