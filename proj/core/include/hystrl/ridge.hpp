#pragma once

#include <string_view>
#include <vector>

namespace hystrl {

enum class RidgeFamily { saturation, table };

/// Bounded nondecreasing shape function gamma. Its shifts gamma(x - s2) and
/// gamma(x - s1) are the lower and upper envelopes of a play kernel.
///
/// The saturation family is gamma(x) = clamp(slope * x, -level, level); the
/// default (slope = level = 1) is max(-1, min(1, x)). The table family
/// interpolates linearly between breakpoints and is held constant outside.
class RidgeFunction {
 public:
  RidgeFunction() = default;

  static RidgeFunction saturation(double slope = 1.0, double level = 1.0);
  /// Throws Errc::invalid_argument unless breakpoints strictly increase and
  /// values are nondecreasing.
  static RidgeFunction table(std::vector<double> breakpoints, std::vector<double> values);

  [[nodiscard]] double operator()(double x) const noexcept;

  [[nodiscard]] RidgeFamily family() const noexcept { return family_; }
  /// Hoelder exponent; 1 for both supported families.
  [[nodiscard]] double alpha() const noexcept { return 1.0; }
  [[nodiscard]] double lipschitz() const noexcept { return lipschitz_; }
  [[nodiscard]] double bound() const noexcept { return bound_; }

  [[nodiscard]] double slope() const noexcept { return slope_; }
  [[nodiscard]] double level() const noexcept { return level_; }
  [[nodiscard]] const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

 private:
  RidgeFamily family_ = RidgeFamily::saturation;
  double slope_ = 1.0;
  double level_ = 1.0;
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  double lipschitz_ = 1.0;
  double bound_ = 1.0;
};

std::string_view to_string(RidgeFamily family) noexcept;

}  // namespace hystrl
