#pragma once

#include <cstddef>
#include <span>

namespace hystrl {

/// Least-squares slope of y against x; NaN for fewer than two points.
[[nodiscard]] double least_squares_slope(std::span<const double> x, std::span<const double> y);

}  // namespace hystrl
