#include "hystrl/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "hystrl/error.hpp"

namespace hystrl {

RidgeFunction RidgeFunction::saturation(double slope, double level) {
  if (!(slope > 0.0) || !(level > 0.0) || !std::isfinite(slope) || !std::isfinite(level)) {
    throw Error(Errc::invalid_argument, "saturation ridge needs positive finite slope and level");
  }
  RidgeFunction r;
  r.family_ = RidgeFamily::saturation;
  r.slope_ = slope;
  r.level_ = level;
  r.lipschitz_ = slope;
  r.bound_ = level;
  return r;
}

RidgeFunction RidgeFunction::table(std::vector<double> breakpoints, std::vector<double> values) {
  if (breakpoints.empty() || breakpoints.size() != values.size()) {
    throw Error(Errc::invalid_argument, "ridge table needs matching, nonempty breakpoints and values");
  }
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!std::isfinite(breakpoints[i]) || !std::isfinite(values[i])) {
      throw Error(Errc::invalid_argument, "ridge table entries must be finite");
    }
    if (i > 0 && !(breakpoints[i] > breakpoints[i - 1])) {
      throw Error(Errc::invalid_argument, "ridge table breakpoints must strictly increase");
    }
    if (i > 0 && values[i] < values[i - 1]) {
      throw Error(Errc::invalid_argument, "ridge table values must be nondecreasing");
    }
  }
  RidgeFunction r;
  r.family_ = RidgeFamily::table;
  r.lipschitz_ = 0.0;
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    r.lipschitz_ = std::max(r.lipschitz_,
                            (values[i] - values[i - 1]) / (breakpoints[i] - breakpoints[i - 1]));
  }
  r.bound_ = std::max(std::abs(values.front()), std::abs(values.back()));
  r.breakpoints_ = std::move(breakpoints);
  r.values_ = std::move(values);
  return r;
}

double RidgeFunction::operator()(double x) const noexcept {
  if (family_ == RidgeFamily::saturation) {
    return std::clamp(slope_ * x, -level_, level_);
  }
  if (x <= breakpoints_.front()) return values_.front();
  if (x >= breakpoints_.back()) return values_.back();
  const auto hi = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  const auto i = static_cast<std::size_t>(std::distance(breakpoints_.begin(), hi));
  const double x0 = breakpoints_[i - 1];
  const double x1 = breakpoints_[i];
  const double y0 = values_[i - 1];
  const double y1 = values_[i];
  return std::clamp(y0 + (y1 - y0) * ((x - x0) / (x1 - x0)), y0, y1);
}

std::string_view to_string(RidgeFamily family) noexcept {
  return family == RidgeFamily::saturation ? "saturation" : "table";
}

}  // namespace hystrl
