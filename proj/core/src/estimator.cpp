#include "hystrl/estimator.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "hystrl/error.hpp"

namespace hystrl {

std::string_view to_string(UpdateState s) noexcept {
  switch (s) {
    case UpdateState::error: return "error";
    case UpdateState::estimate: return "estimate";
    case UpdateState::measured: return "measured";
  }
  return "error";
}

UpdateState update_state_from_string(std::string_view name) {
  if (name == "error") return UpdateState::error;
  if (name == "estimate") return UpdateState::estimate;
  if (name == "measured") return UpdateState::measured;
  throw Error(Errc::invalid_argument, "unknown update state '" + std::string(name) + "'");
}

EstimatorDerivative estimator_rhs(const LinearCore& core, const OperatorBank& bank, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& x_hat, const DistributedParameter& mu_hat,
                                  const Eigen::VectorXd& u, const EstimatorOptions& options) {
  if (x.size() != core.states() || x_hat.size() != core.states() || u.size() != core.inputs()) {
    throw Error(Errc::dimension_mismatch, "estimator state or input size");
  }
  EstimatorDerivative out;
  out.x_hat_dot = core.A * x_hat + core.B * (apply_H(bank, mu_hat) + u);
  Eigen::VectorXd z;
  double sign = -1.0;
  switch (options.state) {
    case UpdateState::error:
      z = x - x_hat;
      sign = 1.0;
      break;
    case UpdateState::estimate: z = x_hat; break;
    case UpdateState::measured: z = x; break;
  }
  if (options.weight.size() != 0) z = options.weight * z;
  out.mu_hat_dot = adjoint_apply(bank, core.B.transpose() * z);
  out.mu_hat_dot *= sign * options.gain;
  return out;
}

IdentificationSystem::IdentificationSystem(LinearCore core, OperatorBank plant_bank, DistributedParameter mu_star,
                                           OperatorBank estimator_bank, Signal u, EstimatorOptions options)
    : core_(std::move(core)), plant_bank_(std::move(plant_bank)), mu_star_(std::move(mu_star)),
      estimator_bank_(std::move(estimator_bank)), u_(std::move(u)), options_(options), m_(core_.states()) {
  if (plant_bank_.mixer().rows() != core_.inputs() || estimator_bank_.mixer().rows() != core_.inputs()) {
    throw Error(Errc::dimension_mismatch, "mixer rows must equal the number of inputs");
  }
  last_u_ = Eigen::VectorXd::Zero(core_.inputs());
}

int IdentificationSystem::dimension() const {
  return 2 * m_ + static_cast<int>(estimator_bank_.width());
}

Eigen::VectorXd IdentificationSystem::pack(const Eigen::VectorXd& x, const Eigen::VectorXd& x_hat,
                                           const DistributedParameter& mu_hat) const {
  Eigen::VectorXd z(dimension());
  z << x, x_hat, mu_hat.flat();
  return z;
}

DistributedParameter IdentificationSystem::mu_hat(const Eigen::VectorXd& z) const {
  return estimator_bank_.zero_parameter().with_flat(z.tail(estimator_bank_.width()));
}

void IdentificationSystem::start(double t0, const Eigen::VectorXd& z0) {
  plant_bank_.start(t0, x(z0));
  estimator_bank_.start(t0, x(z0));
}

Eigen::VectorXd IdentificationSystem::evaluate(double t, const Eigen::VectorXd& z) {
  const Eigen::VectorXd xs = x(z);
  last_u_ = u_ ? u_(t) : Eigen::VectorXd::Zero(core_.inputs());
  const Eigen::VectorXd y = with_provisional(plant_bank_, t, xs, [&] { return apply_H(plant_bank_, mu_star_); });
  Eigen::VectorXd dz(dimension());
  dz.head(m_) = core_.A * xs + core_.B * (y + last_u_);
  with_provisional(estimator_bank_, t, xs, [&] {
    const auto d = estimator_rhs(core_, estimator_bank_, xs, x_hat(z), mu_hat(z), last_u_, options_);
    dz.segment(m_, m_) = d.x_hat_dot;
    dz.tail(estimator_bank_.width()) = d.mu_hat_dot.flat();
    return 0;
  });
  return dz;
}

void IdentificationSystem::commit(double t, const Eigen::VectorXd& z) {
  plant_bank_.advance(t, x(z));
  estimator_bank_.advance(t, x(z));
}

double IdentificationSystem::output_mismatch(const Eigen::VectorXd& z) const {
  return (apply_H(plant_bank_, mu_star_) - apply_H(estimator_bank_, mu_hat(z))).norm();
}

double parameter_distance(const DistributedParameter& a, const DistributedParameter& b) {
  if (a.channels() != b.channels()) throw Error(Errc::dimension_mismatch, "channel counts differ");
  double sum = 0.0;
  for (int i = 0; i < a.channels(); ++i) {
    const int level = std::max(a.channel(i).level, b.channel(i).level);
    const Eigen::VectorXd diff = prolong_channel(a.channel(i), level).values - prolong_channel(b.channel(i), level).values;
    sum += diff.squaredNorm() * a.domain().cell_area(level);
  }
  return std::sqrt(sum);
}

IdentifyRecord identify(IdentificationSystem& system, const Eigen::VectorXd& x0, const Eigen::VectorXd& x_hat0,
                        const DistributedParameter& mu_hat0, const IdentifyOptions& options) {
  const auto steps = static_cast<std::size_t>(std::llround(options.horizon / options.step));
  if (steps == 0) throw Error(Errc::invalid_argument, "identification horizon shorter than one step");
  IdentifyRecord rec;
  rec.estimator_level = mu_hat0.channel(0).level;
  rec.trajectory = Trajectory(options.step);
  const int m = static_cast<int>(x0.size());

  auto record = [&](double t, const Eigen::VectorXd& z) {
    const Eigen::VectorXd xs = system.x(z);
    const Eigen::VectorXd xh = system.x_hat(z);
    rec.x_tilde_norm.push_back((xs - xh).norm());
    rec.output_mismatch.push_back(system.output_mismatch(z));
    rec.mu_tilde_norm.push_back(parameter_distance(system.mu_star(), system.mu_hat(z)));
    rec.x_hat.push_back(xh);
    rec.trajectory.append(t, options.keep_parameters ? z : Eigen::VectorXd(z.head(2 * m)), system.input());
  };

  PredictorCorrector pc(system, options.scheme, options.step);
  const Eigen::VectorXd z0 = system.pack(x0, x_hat0, mu_hat0);
  pc.start(0.0, z0);
  record(0.0, z0);
  for (std::size_t n = 0; n < steps; ++n) {
    const Eigen::VectorXd& z = pc.advance();
    record(pc.time(), z);
  }
  rec.final_mu_hat = system.mu_hat(pc.state());
  return rec;
}

void write_csv(std::ostream& out, const IdentifyRecord& record) {
  out << "t,x_tilde_norm,output_mismatch,mu_tilde_norm\n" << std::setprecision(12);
  const auto& t = record.trajectory.times();
  for (std::size_t n = 0; n < t.size(); ++n) {
    out << t[n] << ',' << record.x_tilde_norm[n] << ',' << record.output_mismatch[n] << ','
        << record.mu_tilde_norm[n] << '\n';
  }
}

}  // namespace hystrl
