#include "hystrl/closed_loop.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "hystrl/error.hpp"
#include "hystrl/estimator.hpp"

namespace hystrl {

void SlidingConfig::validate() const {
  if (!(k > 0.0) || !(epsilon > 0.0)) throw Error(Errc::invalid_argument, "sliding gain and boundary layer must be positive");
  if (level < 0) throw Error(Errc::invalid_argument, "controller level must be nonnegative");
}

Eigen::VectorXd sliding_control(const Eigen::VectorXd& x, const LyapunovPair& pair, const Eigen::MatrixXd& b,
                                const SlidingConfig& cfg) {
  const Eigen::VectorXd s = b.transpose() * (pair.P * x);
  const double norm = s.norm();
  if (norm >= cfg.epsilon) return -cfg.k * s / norm;
  return -(cfg.k / cfg.epsilon) * s;
}

ClosedLoopSystem::ClosedLoopSystem(LinearCore core, StateMap physical, OperatorBank plant_bank,
                                   DistributedParameter mu_star, OperatorBank control_bank, LyapunovPair pair,
                                   SlidingConfig cfg, double adaptation_gain)
    : core_(std::move(core)), physical_(std::move(physical)), plant_bank_(std::move(plant_bank)),
      mu_star_(std::move(mu_star)), control_bank_(std::move(control_bank)), pair_(std::move(pair)), cfg_(cfg),
      gain_(adaptation_gain) {
  cfg_.validate();
  if (!(gain_ > 0.0)) throw Error(Errc::invalid_argument, "adaptation gain must be positive");
  if (pair_.P.rows() != core_.states()) throw Error(Errc::dimension_mismatch, "Lyapunov pair size");
  for (int i = 0; i < control_bank_.channels(); ++i) {
    if (control_bank_.spec(i).level != cfg_.level) throw Error(Errc::level_mismatch, "control bank level differs from n");
  }
  std::vector<ChannelField> fields;
  for (int i = 0; i < mu_star_.channels(); ++i) {
    const auto& ch = mu_star_.channel(i);
    fields.push_back(ch.level >= cfg_.level ? restrict_channel(ch, cfg_.level) : prolong_channel(ch, cfg_.level));
  }
  mu_star_n_ = DistributedParameter(mu_star_.domain(), std::move(fields));
  last_v_ = Eigen::VectorXd::Zero(core_.inputs());
}

int ClosedLoopSystem::dimension() const { return core_.states() + static_cast<int>(control_bank_.width()); }

Eigen::VectorXd ClosedLoopSystem::pack(const Eigen::VectorXd& x, const DistributedParameter& mu_hat) const {
  Eigen::VectorXd z(dimension());
  z << x, mu_hat.flat();
  return z;
}

DistributedParameter ClosedLoopSystem::mu_hat(const Eigen::VectorXd& z) const {
  return control_bank_.zero_parameter().with_flat(z.tail(control_bank_.width()));
}

void ClosedLoopSystem::start(double t0, const Eigen::VectorXd& z0) {
  const Eigen::VectorXd phys = physical_(t0, x(z0));
  plant_bank_.start(t0, phys);
  control_bank_.start(t0, phys);
}

Eigen::VectorXd ClosedLoopSystem::evaluate(double t, const Eigen::VectorXd& z) {
  const Eigen::VectorXd xs = x(z);
  const Eigen::VectorXd phys = physical_(t, xs);
  const Eigen::VectorXd y = with_provisional(plant_bank_, t, phys, [&] { return apply_H(plant_bank_, mu_star_); });
  last_v_ = sliding_control(xs, pair_, core_.B, cfg_);
  Eigen::VectorXd dz(dimension());
  with_provisional(control_bank_, t, phys, [&] {
    const Eigen::VectorXd u = last_v_ - apply_H(control_bank_, mu_hat(z));
    dz.head(core_.states()) = core_.A * xs + core_.B * (y + u);
    const Eigen::VectorXd s = core_.B.transpose() * (pair_.P * xs);
    dz.tail(control_bank_.width()) = gain_ * adjoint_apply(control_bank_, s).flat();
    return 0;
  });
  return dz;
}

void ClosedLoopSystem::commit(double t, const Eigen::VectorXd& z) {
  const Eigen::VectorXd phys = physical_(t, x(z));
  plant_bank_.advance(t, phys);
  control_bank_.advance(t, phys);
}

Eigen::VectorXd ClosedLoopSystem::residual() const {
  return apply_H(plant_bank_, mu_star_) - apply_H(control_bank_, mu_star_n_);
}

double ClosedLoopSystem::lyapunov_value(const Eigen::VectorXd& z) const {
  const Eigen::VectorXd xs = x(z);
  const double mu_tilde = parameter_distance(mu_star_n_, mu_hat(z));
  return 0.5 * xs.dot(pair_.P * xs) + 0.5 * mu_tilde * mu_tilde / gain_;
}

double chatter_rate(const std::vector<double>& times, const std::vector<Eigen::VectorXd>& signals, double t_from) {
  if (times.size() < 2 || signals.empty() || signals.front().size() == 0) return 0.0;
  const Eigen::Index q = signals.front().size();
  std::size_t first = 0;
  while (first < times.size() && times[first] < t_from) ++first;
  if (first + 1 >= times.size()) return 0.0;
  const double span = times.back() - times[first];
  double worst = 0.0;
  for (Eigen::Index i = 0; i < q; ++i) {
    int changes = 0;
    double prev = 0.0;
    for (std::size_t n = first; n < times.size(); ++n) {
      const double v = signals[n][i];
      if (v == 0.0) continue;
      if (prev != 0.0 && (v > 0.0) != (prev > 0.0)) ++changes;
      prev = v;
    }
    worst = std::max(worst, changes / span);
  }
  return worst;
}

ClosedLoopRecord closed_loop(ClosedLoopSystem& system, const Eigen::VectorXd& x0, const DistributedParameter& mu_hat0,
                             const ClosedLoopOptions& options) {
  const auto steps = static_cast<std::size_t>(std::llround(options.horizon / options.step));
  if (steps < 2) throw Error(Errc::invalid_argument, "closed-loop horizon must cover at least two steps");
  ClosedLoopRecord rec;
  rec.trajectory = Trajectory(options.step);
  std::vector<double> quad;  // X^T Q X / 2 per node
  Eigen::VectorXd last_z;

  auto record = [&](double t, const Eigen::VectorXd& z) {
    const Eigen::VectorXd xs = system.x(z);
    rec.trajectory.append(t, xs, system.input());
    rec.lyapunov.push_back(system.lyapunov_value(z));
    rec.residual_norm.push_back(system.residual().norm());
    quad.push_back(0.5 * xs.dot(system.pair().Q * xs));
    last_z = z;
  };

  PredictorCorrector pc(system, options.scheme, options.step);
  const Eigen::VectorXd z0 = system.pack(x0, mu_hat0);
  pc.start(0.0, z0);
  record(0.0, z0);
  for (std::size_t n = 0; n < steps; ++n) {
    const Eigen::VectorXd& z = pc.advance();
    if (!z.allFinite()) throw Error(Errc::run_diverged, "closed loop diverged");
    record(pc.time(), z);
  }

  auto& m = rec.metrics;
  const auto& times = rec.trajectory.times();
  const auto& states = rec.trajectory.states();
  const double t_tail = times.back() - options.tail_fraction * (times.back() - times.front());
  for (std::size_t n = 0; n < times.size(); ++n) {
    if (times[n] >= t_tail) m.tail_sup = std::max(m.tail_sup, states[n].norm());
    m.residual_sup = std::max(m.residual_sup, rec.residual_norm[n]);
  }
  const auto& cfg = system.config();
  m.ultimate_constant = m.tail_sup / cfg.epsilon;
  m.chatter_rate = chatter_rate(times, rec.trajectory.inputs(), t_tail);
  m.chattering = m.chatter_rate > options.chatter_threshold;

  const double bound_shift = cfg.epsilon * cfg.k + options.dissipation_slack * options.step;
  std::size_t violations = 0;
  for (std::size_t n = 1; n + 1 < times.size(); ++n) {
    const double vdot = (rec.lyapunov[n + 1] - rec.lyapunov[n - 1]) / (times[n + 1] - times[n - 1]);
    if (vdot > -quad[n] + bound_shift) ++violations;
  }
  m.dissipation_violation_rate = static_cast<double>(violations) / static_cast<double>(times.size() - 2);
  m.final_x_norm = states.back().norm();
  rec.final_mu_hat = system.mu_hat(last_z);
  m.final_mu_tilde_norm = parameter_distance(system.projected_mu_star(), rec.final_mu_hat);
  return rec;
}

void write_csv(std::ostream& out, const ClosedLoopRecord& record) {
  const auto& traj = record.trajectory;
  const Eigen::Index m = traj.empty() ? 0 : traj.states().front().size();
  const Eigen::Index q = traj.empty() ? 0 : traj.inputs().front().size();
  out << 't';
  for (Eigen::Index i = 1; i <= m; ++i) out << ",x" << i;
  for (Eigen::Index i = 1; i <= q; ++i) out << ",v" << i;
  out << ",V,d_norm\n" << std::setprecision(12);
  for (std::size_t n = 0; n < traj.size(); ++n) {
    out << traj.times()[n];
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << traj.states()[n][i];
    for (Eigen::Index i = 0; i < q; ++i) out << ',' << traj.inputs()[n][i];
    out << ',' << record.lyapunov[n] << ',' << record.residual_norm[n] << '\n';
  }
}

}  // namespace hystrl
