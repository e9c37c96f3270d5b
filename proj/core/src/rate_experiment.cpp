#include "hystrl/rate_experiment.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include "hystrl/error.hpp"
#include "hystrl/fit.hpp"
#include "hystrl/operator_bank.hpp"

namespace hystrl {

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return std::nan("");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

namespace {

std::vector<double> sample_times(const PiecewiseLinearInput& f, int sub) {
  std::vector<double> out;
  const auto& t = f.times();
  out.push_back(t.front());
  for (std::size_t i = 1; i < t.size(); ++i) {
    for (int k = 1; k <= sub; ++k) {
      out.push_back(t[i - 1] + (t[i] - t[i - 1]) * k / (sub + 1));
    }
    out.push_back(t[i]);
  }
  return out;
}

std::vector<double> output_series(const RidgeFunction& gamma, const TriDomain& domain,
                                  const ChannelField& mu, const PiecewiseLinearInput& f,
                                  const std::vector<double>& times) {
  OperatorBank bank(domain, {{gamma, mu.level}}, Scalarizer::coordinate(0), Mixer(Eigen::MatrixXd::Ones(1, 1)));
  const DistributedParameter param(domain, {mu});
  std::vector<double> out;
  out.reserve(times.size());
  Eigen::VectorXd x(1);
  x[0] = f.at(times.front());
  bank.start(times.front(), x);
  out.push_back(apply_hj(bank, param)[0]);
  for (std::size_t n = 1; n < times.size(); ++n) {
    x[0] = f.at(times[n]);
    bank.advance(times[n], x);
    out.push_back(apply_hj(bank, param)[0]);
  }
  return out;
}

}  // namespace

RateResult rate_experiment(const RidgeFunction& gamma, const PiecewiseLinearInput& f, const PointFunction& mu_fn,
                           const TriDomain& domain, const RateOptions& options) {
  const ChannelField fine = project_analytic_channel(mu_fn, domain, options.fine_level,
                                                     options.fine_level + options.oversample);
  return rate_experiment(gamma, f, fine, domain, options);
}

RateResult rate_experiment(const RidgeFunction& gamma, const PiecewiseLinearInput& f,
                           const ChannelField& mu_fine, const TriDomain& domain, const RateOptions& options) {
  for (int j : options.levels) {
    if (j < 0 || j >= mu_fine.level) throw Error(Errc::level_mismatch, "coarse levels must lie below J");
  }
  RateResult result;
  result.fine_level = mu_fine.level;
  result.times = sample_times(f, options.subsamples_per_segment);
  result.samples = result.times.size();
  result.fine_output = output_series(gamma, domain, mu_fine, f, result.times);

  std::vector<double> js, logs;
  for (int j : options.levels) {
    const auto coarse = output_series(gamma, domain, restrict_channel(mu_fine, j), f, result.times);
    double err = 0.0;
    for (std::size_t n = 0; n < coarse.size(); ++n) err = std::max(err, std::abs(coarse[n] - result.fine_output[n]));
    result.rows.push_back({j, err, err * std::exp2((gamma.alpha() + 1.0) * j)});
    if (err > 0.0) {
      js.push_back(j);
      logs.push_back(std::log2(err));
    }
  }
  result.slope = least_squares_slope(js, logs);
  return result;
}

PiecewiseLinearInput oscillatory_input(int segments, double amplitude, std::uint64_t seed, double dt) {
  if (segments < 1 || amplitude <= 0.0 || dt <= 0.0) {
    throw Error(Errc::invalid_argument, "oscillatory input needs positive segments, amplitude and dt");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.2, 1.0);
  std::vector<double> times{0.0};
  std::vector<double> values{0.0};
  double sign = 1.0;
  for (int i = 1; i <= segments; ++i) {
    times.push_back(i * dt);
    values.push_back(sign * amplitude * mag(rng));
    sign = -sign;
  }
  return PiecewiseLinearInput(std::move(times), std::move(values));
}

void write_csv(std::ostream& out, const RateResult& result) {
  out << "j,e_j,C_j\n" << std::setprecision(17);
  for (const auto& row : result.rows) out << row.level << ',' << row.error << ',' << row.constant << '\n';
  out << "slope," << result.slope << ",\n";
}

}  // namespace hystrl
