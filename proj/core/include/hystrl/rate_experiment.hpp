#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hystrl/distributed_parameter.hpp"
#include "hystrl/play_kernel.hpp"
#include "hystrl/ridge.hpp"

namespace hystrl {

struct RateRow {
  int level = 0;
  double error = 0.0;     ///< max_t |(h_J f)(t) o mu_J - (h_j f)(t) o mu_j|
  double constant = 0.0;  ///< error * 2^{(alpha + 1) j}
};

struct RateResult {
  int fine_level = 0;
  std::vector<RateRow> rows;
  double slope = 0.0;  ///< least-squares slope of log2(error) against j
  std::size_t samples = 0;
  /// Sampled (h_J f)(t) o mu_J, handy for plotting.
  std::vector<double> times;
  std::vector<double> fine_output;
};

struct RateOptions {
  int fine_level = 7;
  std::vector<int> levels{2, 3, 4, 5};
  int oversample = 2;                 ///< mu_J = Pi_J mu computed at level J + oversample
  int subsamples_per_segment = 4;     ///< interior sample points per linear piece
};

/// Error table comparing the level-j quadrature against level J, with
/// mu_j = restrict(mu_J, j).
[[nodiscard]] RateResult rate_experiment(const RidgeFunction& gamma, const PiecewiseLinearInput& f,
                                         const PointFunction& mu_fn, const TriDomain& domain,
                                         const RateOptions& options);

/// Same with an already discretized fine parameter (single channel).
[[nodiscard]] RateResult rate_experiment(const RidgeFunction& gamma, const PiecewiseLinearInput& f,
                                         const ChannelField& mu_fine, const TriDomain& domain,
                                         const RateOptions& options);

/// Random oscillatory input: `segments` linear pieces on [0, segments * dt],
/// alternating direction, with turning points in [-amplitude, amplitude].
[[nodiscard]] PiecewiseLinearInput oscillatory_input(int segments, double amplitude, std::uint64_t seed,
                                                     double dt = 0.1);

/// Rows "j,e_j,C_j" followed by "slope,<value>,".
void write_csv(std::ostream& out, const RateResult& result);

}  // namespace hystrl
