#include "hystrl/play_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "hystrl/error.hpp"

namespace hystrl {

PiecewiseLinearInput::PiecewiseLinearInput(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.empty() || times_.size() != values_.size()) {
    throw Error(Errc::invalid_argument, "piecewise-linear input needs matching nonempty arrays");
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) {
      throw Error(Errc::non_monotone_time, "breakpoint times must strictly increase");
    }
  }
}

void PiecewiseLinearInput::append(double t, double value) {
  if (!times_.empty() && !(t > times_.back())) {
    throw Error(Errc::non_monotone_time, "breakpoint times must strictly increase");
  }
  times_.push_back(t);
  values_.push_back(value);
}

void PiecewiseLinearInput::truncate(std::size_t count) {
  times_.resize(std::min(count, times_.size()));
  values_.resize(times_.size());
}

namespace {

// Interpolated value confined to the segment's own range so that a partial
// step never leaves the monotone piece it belongs to.
double interpolate(double t0, double t1, double v0, double v1, double t) {
  const double w = (t - t0) / (t1 - t0);
  return std::clamp(v0 + (v1 - v0) * w, std::min(v0, v1), std::max(v0, v1));
}

}  // namespace

double PiecewiseLinearInput::at(double t) const {
  if (times_.empty() || t < times_.front() || t > times_.back()) {
    throw Error(Errc::time_out_of_range, "query time outside the recorded history");
  }
  const auto hi = std::upper_bound(times_.begin(), times_.end(), t);
  if (hi == times_.end()) return values_.back();
  const auto i = static_cast<std::size_t>(std::distance(times_.begin(), hi));
  return interpolate(times_[i - 1], times_[i], values_[i - 1], values_[i], t);
}

PlayKernelState kernel_init(const RidgeFunction& gamma, ThresholdPair s, double f0,
                            double kappa_seed) noexcept {
  const double lower = gamma(f0 - s.s2);
  const double upper = gamma(f0 - s.s1);
  return {std::clamp(kappa_seed, lower, upper), f0};
}

PlayKernelState kernel_step(PlayKernelState state, const RidgeFunction& gamma, ThresholdPair s,
                            double f_new) noexcept {
  if (f_new == state.last_input) return state;
  const double lower = gamma(f_new - s.s2);
  const double upper = gamma(f_new - s.s1);
  double kappa = f_new > state.last_input ? std::max(state.kappa, lower)
                                          : std::min(state.kappa, upper);
  // No-op for nondecreasing gamma; guards tables with flat steps against drift.
  kappa = std::clamp(kappa, lower, upper);
  return {kappa, f_new};
}

double kernel_eval(const RidgeFunction& gamma, ThresholdPair s, const PiecewiseLinearInput& f,
                   double t, double kappa_seed) {
  if (f.empty() || t < f.front_time() || t > f.back_time()) {
    throw Error(Errc::time_out_of_range, "kernel evaluated outside the recorded history");
  }
  const auto& times = f.times();
  const auto& values = f.values();
  PlayKernelState state = kernel_init(gamma, s, values.front(), kappa_seed);
  std::size_t i = 1;
  for (; i < times.size() && times[i] <= t; ++i) {
    state = kernel_step(state, gamma, s, values[i]);
  }
  if (i < times.size() && t > times[i - 1]) {
    state = kernel_step(state, gamma, s,
                        interpolate(times[i - 1], times[i], values[i - 1], values[i], t));
  }
  return state.kappa;
}

}  // namespace hystrl
