#include "hystrl/plant.hpp"

#include <cmath>
#include <limits>

#include "hystrl/error.hpp"

namespace hystrl {

double spectral_abscissa(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() == 0) throw Error(Errc::dimension_mismatch, "A must be square");
  return Eigen::EigenSolver<Eigen::MatrixXd>(a, false).eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Eigen::MatrixXd& a) { return spectral_abscissa(a) < 0.0; }

LinearCore block_companion(const Eigen::MatrixXd& g0, const Eigen::MatrixXd& g1) {
  const Eigen::Index n = g0.rows();
  if (g0.cols() != n || g1.rows() != n || g1.cols() != n) {
    throw Error(Errc::dimension_mismatch, "gains must be square and equal in size");
  }
  LinearCore core;
  core.A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  core.A.topRightCorner(n, n).setIdentity();
  core.A.bottomLeftCorner(n, n) = -g0;
  core.A.bottomRightCorner(n, n) = -g1;
  core.B = Eigen::MatrixXd::Zero(2 * n, n);
  core.B.bottomRows(n).setIdentity();
  if (!is_hurwitz(core.A)) throw Error(Errc::not_hurwitz, "block companion matrix is not Hurwitz");
  return core;
}

GeneralPlant::GeneralPlant(LinearCore core, OperatorBank bank, DistributedParameter mu, Signal u, StateMap bank_state)
    : core_(std::move(core)), bank_(std::move(bank)), mu_(std::move(mu)), u_(std::move(u)), map_(std::move(bank_state)) {
  if (core_.A.rows() != core_.A.cols() || core_.B.rows() != core_.A.rows()) {
    throw Error(Errc::dimension_mismatch, "A and B shapes disagree");
  }
  if (bank_.mixer().rows() != core_.inputs()) {
    throw Error(Errc::dimension_mismatch, "mixer rows must equal the number of inputs");
  }
  last_u_ = Eigen::VectorXd::Zero(core_.inputs());
  last_y_ = Eigen::VectorXd::Zero(core_.inputs());
}

Eigen::VectorXd GeneralPlant::bank_state(double t, const Eigen::VectorXd& x) const {
  return map_ ? map_(t, x) : x;
}

void GeneralPlant::start(double t0, const Eigen::VectorXd& x0) { bank_.start(t0, bank_state(t0, x0)); }

Eigen::VectorXd GeneralPlant::evaluate(double t, const Eigen::VectorXd& x) {
  last_y_ = with_provisional(bank_, t, bank_state(t, x), [&] { return apply_H(bank_, mu_); });
  last_u_ = u_ ? u_(t) : Eigen::VectorXd::Zero(core_.inputs());
  return core_.A * x + core_.B * (last_y_ + last_u_);
}

void GeneralPlant::commit(double t, const Eigen::VectorXd& x) { bank_.advance(t, bank_state(t, x)); }

Eigen::VectorXd RoboticForm::acceleration(const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                          const Eigen::VectorXd& generalized_force) const {
  const Eigen::VectorXd rhs = generalized_force - coriolis(q, qd) * qd - potential_gradient(q);
  return mass(q).ldlt().solve(rhs);
}

namespace {

void check_gains(const RoboticForm& robotic, const Eigen::MatrixXd& g0, const Eigen::MatrixXd& g1) {
  if (g0.rows() != robotic.dof || g1.rows() != robotic.dof) {
    throw Error(Errc::dimension_mismatch, "gain size must equal the number of degrees of freedom");
  }
}

Mixer robotic_mixer(const RoboticForm& robotic, int channels) {
  const int n = robotic.dof;
  return Mixer(n, channels, [robotic, n](const Eigen::VectorXd& phys) -> Eigen::MatrixXd {
    const Eigen::VectorXd q = phys.head(n);
    return robotic.mass(q).ldlt().solve(robotic.aero_map(q));
  });
}

int aero_channels(const RoboticForm& robotic) {
  return static_cast<int>(robotic.aero_map(Eigen::VectorXd::Zero(robotic.dof)).cols());
}

}  // namespace

FeedbackTransform regulator_transform(const RoboticForm& robotic, const Eigen::MatrixXd& g0, const Eigen::MatrixXd& g1) {
  check_gains(robotic, g0, g1);
  FeedbackTransform out;
  out.core = block_companion(g0, g1);
  out.tau = [robotic, g0, g1](double, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                              const Eigen::VectorXd& u) -> Eigen::VectorXd {
    return robotic.mass(q) * (u - g1 * qd - g0 * q) + robotic.coriolis(q, qd) * qd + robotic.potential_gradient(q);
  };
  out.mixer = robotic_mixer(robotic, aero_channels(robotic));
  out.physical = [](double, const Eigen::VectorXd& x) { return x; };
  return out;
}

FeedbackTransform tracking_transform(const RoboticForm& robotic, Reference ref, const Eigen::MatrixXd& g0,
                                     const Eigen::MatrixXd& g1) {
  check_gains(robotic, g0, g1);
  if (!ref.q || !ref.qd || !ref.qdd) throw Error(Errc::invalid_argument, "reference needs q_d and two derivatives");
  FeedbackTransform out;
  out.core = block_companion(g0, g1);
  out.tau = [robotic, ref, g0, g1](double t, const Eigen::VectorXd& q, const Eigen::VectorXd& qd,
                                   const Eigen::VectorXd& u) -> Eigen::VectorXd {
    const Eigen::VectorXd e = q - ref.q(t);
    const Eigen::VectorXd ed = qd - ref.qd(t);
    return robotic.mass(q) * (u + ref.qdd(t) - g1 * ed - g0 * e) + robotic.coriolis(q, qd) * qd +
           robotic.potential_gradient(q);
  };
  out.mixer = robotic_mixer(robotic, aero_channels(robotic));
  const int n = robotic.dof;
  out.physical = [ref, n](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd phys(2 * n);
    phys.head(n) = x.head(n) + ref.q(t);
    phys.tail(n) = x.tail(n) + ref.qd(t);
    return phys;
  };
  return out;
}

RoboticPlant::RoboticPlant(RoboticForm robotic, OperatorBank bank, DistributedParameter mu, Torque tau)
    : robotic_(std::move(robotic)), bank_(std::move(bank)), mu_(std::move(mu)), tau_(std::move(tau)) {
  last_tau_ = Eigen::VectorXd::Zero(robotic_.dof);
}

void RoboticPlant::start(double t0, const Eigen::VectorXd& x0) { bank_.start(t0, x0); }

Eigen::VectorXd RoboticPlant::evaluate(double t, const Eigen::VectorXd& x) {
  const int n = robotic_.dof;
  const Eigen::VectorXd q = x.head(n);
  const Eigen::VectorXd qd = x.tail(n);
  const Eigen::VectorXd h = with_provisional(bank_, t, x, [&] { return apply_hj(bank_, mu_); });
  last_tau_ = tau_ ? tau_(t, q, qd) : Eigen::VectorXd::Zero(n);
  Eigen::VectorXd out(2 * n);
  out.head(n) = qd;
  out.tail(n) = robotic_.acceleration(q, qd, robotic_.aero_map(q) * h + last_tau_);
  return out;
}

void RoboticPlant::commit(double t, const Eigen::VectorXd& x) { bank_.advance(t, x); }

ContractionEstimate contraction_horizon(const LinearCore& core, const ContractionConstants& c) {
  if (c.m_a < 0 || c.m_mu < 0 || c.m_h < 0 || c.m_u < 0 || c.lipschitz < 0 || !(c.radius > 0) || !(c.window > 0)) {
    throw Error(Errc::invalid_argument, "contraction constants must be nonnegative with r, h > 0");
  }
  ContractionEstimate est;
  est.constants = c;
  auto spectral_norm = [](const Eigen::MatrixXd& m) {
    return m.size() == 0 ? 0.0 : Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
  };
  est.norm_a = spectral_norm(core.A);
  est.norm_b = spectral_norm(core.B);
  const double inf = std::numeric_limits<double>::infinity();
  const double growth = est.norm_a + est.norm_b * c.m_mu * c.lipschitz;
  const double m_t = c.m_h + c.m_u;
  const double denom = growth * c.radius + c.m_a + est.norm_b * m_t;
  const double ball = denom > 0.0 ? c.radius / denom : inf;
  const double contraction = growth > 0.0 ? 1.0 / growth : inf;
  est.delta = 0.99 * std::min({c.window, ball, contraction});
  return est;
}

}  // namespace hystrl
