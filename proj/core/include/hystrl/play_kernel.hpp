#pragma once

#include <cstddef>
#include <vector>

#include "hystrl/ridge.hpp"

namespace hystrl {

/// Threshold pair s = (s1, s2), s1 <= s2.
struct ThresholdPair {
  double s1 = 0.0;
  double s2 = 0.0;
};

struct PlayKernelState {
  double kappa = 0.0;
  double last_input = 0.0;
};

/// Piecewise-linear input history. Times strictly increase.
class PiecewiseLinearInput {
 public:
  PiecewiseLinearInput() = default;
  PiecewiseLinearInput(std::vector<double> times, std::vector<double> values);

  void append(double t, double value);

  [[nodiscard]] std::size_t size() const noexcept { return times_.size(); }
  [[nodiscard]] bool empty() const noexcept { return times_.empty(); }
  [[nodiscard]] const std::vector<double>& times() const noexcept { return times_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
  [[nodiscard]] double front_time() const { return times_.front(); }
  [[nodiscard]] double back_time() const { return times_.back(); }

  /// Linear interpolation; Errc::time_out_of_range outside the recorded span.
  [[nodiscard]] double at(double t) const;

  /// Drops every breakpoint after index `count - 1`.
  void truncate(std::size_t count);

 private:
  std::vector<double> times_;
  std::vector<double> values_;
};

/// kappa = clamp(seed, gamma(f0 - s2), gamma(f0 - s1)).
[[nodiscard]] PlayKernelState kernel_init(const RidgeFunction& gamma, ThresholdPair s, double f0,
                                          double kappa_seed = 0.0) noexcept;

/// One monotone segment last_input -> f_new of the generalized play recursion.
/// The result is also clamped into both envelopes at f_new.
[[nodiscard]] PlayKernelState kernel_step(PlayKernelState state, const RidgeFunction& gamma,
                                          ThresholdPair s, double f_new) noexcept;

/// Output kappa(s, t, f). Errc::time_out_of_range if t lies outside the history.
[[nodiscard]] double kernel_eval(const RidgeFunction& gamma, ThresholdPair s,
                                 const PiecewiseLinearInput& f, double t, double kappa_seed = 0.0);

}  // namespace hystrl
