#include "hystrl/integro_benchmark.hpp"

#include <cmath>

#include "hystrl/error.hpp"

namespace hystrl {

void IntegroBenchmark::start(double t0, const Eigen::VectorXd& x0) {
  times_ = {t0};
  values_ = {x0[0]};
  integrals_ = {0.0};
}

double IntegroBenchmark::integral_to(double t, double u) const {
  const double tn = times_.back();
  if (t < tn) throw Error(Errc::non_monotone_time, "benchmark evaluated before the committed history");
  if (t == tn) return integrals_.back();
  // Nodes: (t, u) plus up to three committed ones.
  double nodes_t[4];
  double nodes_u[4];
  int count = 1;
  nodes_t[0] = t;
  nodes_u[0] = u;
  for (std::size_t i = times_.size(); i > 0 && count < 4; --i, ++count) {
    nodes_t[count] = times_[i - 1];
    nodes_u[count] = values_[i - 1];
  }
  auto lagrange = [&](double s) {
    double sum = 0.0;
    for (int a = 0; a < count; ++a) {
      double w = 1.0;
      for (int b = 0; b < count; ++b) {
        if (b != a) w *= (s - nodes_t[b]) / (nodes_t[a] - nodes_t[b]);
      }
      sum += w * nodes_u[a];
    }
    return sum;
  };
  // Two-point Gauss-Legendre is exact for the cubic.
  const double mid = 0.5 * (t + tn);
  const double half = 0.5 * (t - tn);
  const double g = half / std::sqrt(3.0);
  return integrals_.back() + half * (lagrange(mid - g) + lagrange(mid + g));
}

Eigen::VectorXd IntegroBenchmark::evaluate(double t, const Eigen::VectorXd& x) {
  Eigen::VectorXd out(1);
  out[0] = 1.0 - 2.0 * x[0] - 5.0 * integral_to(t, x[0]);
  return out;
}

void IntegroBenchmark::commit(double t, const Eigen::VectorXd& x) {
  const double integral = integral_to(t, x[0]);
  times_.push_back(t);
  values_.push_back(x[0]);
  integrals_.push_back(integral);
}

double IntegroBenchmark::exact(double x) { return 0.5 * std::exp(-x) * std::sin(2.0 * x); }

double IntegroBenchmark::exact_integral(double x) {
  // int e^{-t} sin 2t dt = -e^{-t}(sin 2t + 2 cos 2t) / 5.
  return 0.5 * (2.0 / 5.0 - std::exp(-x) * (std::sin(2.0 * x) + 2.0 * std::cos(2.0 * x)) / 5.0);
}

}  // namespace hystrl
