#include "hystrl/fde_integrator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "hystrl/error.hpp"
#include "hystrl/fit.hpp"

namespace hystrl {

void Trajectory::append(double t, Eigen::VectorXd x, Eigen::VectorXd u) {
  if (!times_.empty() && !(t > times_.back())) {
    throw Error(Errc::non_monotone_time, "trajectory nodes must strictly increase");
  }
  times_.push_back(t);
  states_.push_back(std::move(x));
  inputs_.push_back(std::move(u));
}

Eigen::VectorXd Trajectory::state_at(double t) const {
  if (times_.empty() || t < times_.front() || t > times_.back()) {
    throw Error(Errc::time_out_of_range, "trajectory queried outside its span");
  }
  const auto hi = std::upper_bound(times_.begin(), times_.end(), t);
  if (hi == times_.end()) return states_.back();
  const auto i = static_cast<std::size_t>(hi - times_.begin());
  const double w = (t - times_[i - 1]) / (times_[i] - times_[i - 1]);
  return (1.0 - w) * states_[i - 1] + w * states_[i];
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  const Eigen::Index m = traj.empty() ? 0 : traj.states().front().size();
  const Eigen::Index q = traj.empty() ? 0 : traj.inputs().front().size();
  out << 't';
  for (Eigen::Index i = 1; i <= m; ++i) out << ",x" << i;
  for (Eigen::Index i = 1; i <= q; ++i) out << ",u" << i;
  out << '\n' << std::setprecision(12);
  for (std::size_t n = 0; n < traj.size(); ++n) {
    out << traj.times()[n];
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << traj.states()[n][i];
    for (Eigen::Index i = 0; i < q && i < traj.inputs()[n].size(); ++i) out << ',' << traj.inputs()[n][i];
    out << '\n';
  }
}

PcScheme PcScheme::adams(int p) {
  if (p != 1 && p != 2 && p != 4) throw Error(Errc::invalid_argument, "scheme order must be 1, 2 or 4");
  PcScheme s;
  s.order = p;
  s.startup_substeps = p == 4 ? 16 : 1;
  return s;
}

std::vector<double> PcScheme::bashforth(int steps) {
  switch (steps) {
    case 1: return {1.0};
    case 2: return {1.5, -0.5};
    case 3: return {23.0 / 12.0, -16.0 / 12.0, 5.0 / 12.0};
    case 4: return {55.0 / 24.0, -59.0 / 24.0, 37.0 / 24.0, -9.0 / 24.0};
    default: throw Error(Errc::invalid_argument, "Adams-Bashforth supports 1 to 4 steps");
  }
}

std::vector<double> PcScheme::moulton(int q) {
  switch (q) {
    case 1: return {1.0};
    case 2: return {0.5, 0.5};
    case 3: return {5.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0};
    case 4: return {9.0 / 24.0, 19.0 / 24.0, -5.0 / 24.0, 1.0 / 24.0};
    default: throw Error(Errc::invalid_argument, "Adams-Moulton supports orders 1 to 4");
  }
}

PredictorCorrector::PredictorCorrector(HistoryRhs& rhs, PcScheme scheme, double step)
    : rhs_(rhs), scheme_(scheme), h_(step) {
  if (!(step > 0.0)) throw Error(Errc::invalid_argument, "step must be positive");
  if (scheme.order != 1 && scheme.order != 2 && scheme.order != 4) {
    throw Error(Errc::invalid_argument, "scheme order must be 1, 2 or 4");
  }
  if (scheme.startup_substeps < 1) throw Error(Errc::invalid_argument, "startup_substeps must be >= 1");
}

void PredictorCorrector::start(double t0, const Eigen::VectorXd& x0, Trajectory& traj) {
  start(t0, x0);
  traj.append(t0, x0, rhs_.input());
}

void PredictorCorrector::start(double t0, const Eigen::VectorXd& x0) {
  if (x0.size() != rhs_.dimension()) throw Error(Errc::dimension_mismatch, "initial state dimension");
  rhs_.start(t0, x0);
  Eigen::VectorXd f0 = rhs_.evaluate(t0, x0);
  t0_ = t_ = t0;
  x_ = x0;
  steps_ = 0;
  main_ = Ladder{h_, 0, {f0}};
  startup_ = Ladder{h_ / scheme_.startup_substeps, 0, {f0}};
}

Eigen::VectorXd PredictorCorrector::pece(Ladder& ladder, double t_next, const Eigen::VectorXd& x) {
  const int p = scheme_.order;
  const int k = static_cast<int>(ladder.derivs.size());
  if (k < 1) throw Error(Errc::startup_underflow, "no derivative history to extrapolate from");
  const auto ab = PcScheme::bashforth(std::min(p, k));
  const auto am = PcScheme::moulton(p == 1 ? 1 : std::min(p, k + 1));
  const double h = ladder.h;

  Eigen::VectorXd pred = x;
  for (std::size_t i = 0; i < ab.size(); ++i) pred += h * ab[i] * ladder.derivs[i];
  const Eigen::VectorXd f_pred = rhs_.evaluate(t_next, pred);

  Eigen::VectorXd corr = x + h * am[0] * f_pred;
  for (std::size_t i = 1; i < am.size(); ++i) corr += h * am[i] * ladder.derivs[i - 1];
  if (!corr.allFinite()) throw Error(Errc::nan_detected, "non-finite state at t = " + std::to_string(t_next));

  rhs_.commit(t_next, corr);
  ladder.derivs.push_front(rhs_.evaluate(t_next, corr));
  while (ladder.derivs.size() > 4) ladder.derivs.pop_back();
  ++ladder.count;
  return corr;
}

void PredictorCorrector::step(Trajectory& traj) {
  advance();
  traj.append(t_, x_, rhs_.input());
}

const Eigen::VectorXd& PredictorCorrector::advance() {
  const double t_next = t0_ + static_cast<double>(steps_ + 1) * h_;
  const int ramp = scheme_.order - 1;
  if (scheme_.startup_substeps > 1 && static_cast<int>(steps_) < ramp) {
    const int m = scheme_.startup_substeps;
    for (int s = 1; s <= m; ++s) {
      const double ts = s == m ? t_next : t_ + s * startup_.h;
      x_ = pece(startup_, ts, x_);
    }
    main_.derivs.push_front(startup_.derivs.front());
    ++main_.count;
  } else {
    x_ = pece(main_, t_next, x_);
  }
  t_ = t_next;
  ++steps_;
  return x_;
}

Trajectory integrate(const Eigen::VectorXd& x0, HistoryRhs& rhs, const PcScheme& scheme, double step,
                     double horizon, double t0) {
  if (!(horizon > 0.0) || !(step > 0.0)) throw Error(Errc::invalid_argument, "T and t_h must be positive");
  const auto n = static_cast<std::size_t>(std::llround(horizon / step));
  if (n == 0 || std::abs(static_cast<double>(n) * step - horizon) > 1e-9 * horizon) {
    throw Error(Errc::invalid_argument, "t_h must divide T");
  }
  Trajectory traj(step);
  PredictorCorrector pc(rhs, scheme, step);
  pc.start(t0, x0, traj);
  for (std::size_t i = 0; i < n; ++i) pc.step(traj);
  return traj;
}

OrderCheck order_check(const std::function<std::unique_ptr<HistoryRhs>()>& make_rhs, const Eigen::VectorXd& x0,
                       const std::function<Eigen::VectorXd(double)>& exact, const PcScheme& scheme,
                       const std::vector<double>& steps, double horizon, double exact_tol) {
  if (steps.size() < 3) throw Error(Errc::invalid_argument, "order check needs at least three step sizes");
  OrderCheck out;
  out.steps = steps;
  const Eigen::VectorXd reference = exact(horizon);
  std::vector<double> lx, ly;
  bool all_exact = true;
  for (double h : steps) {
    auto rhs = make_rhs();
    const Trajectory traj = integrate(x0, *rhs, scheme, h, horizon);
    const double err = (traj.back() - reference).cwiseAbs().maxCoeff();
    out.errors.push_back(err);
    all_exact = all_exact && err <= exact_tol * std::max(1.0, reference.cwiseAbs().maxCoeff());
    lx.push_back(std::log(h));
    ly.push_back(std::log(std::max(err, 1e-300)));
  }
  out.exact = all_exact;
  out.slope = least_squares_slope(lx, ly);
  return out;
}

}  // namespace hystrl
