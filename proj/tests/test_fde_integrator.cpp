#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>

#include <hystrl/error.hpp>
#include <hystrl/fde_integrator.hpp>
#include <hystrl/integro_benchmark.hpp>
#include <hystrl/operator_bank.hpp>

#include "support/generators.hpp"

using namespace hystrl;

namespace {

Eigen::VectorXd rk4(const Eigen::MatrixXd& a, Eigen::VectorXd x, double h, int steps) {
  for (int n = 0; n < steps; ++n) {
    const Eigen::VectorXd k1 = a * x;
    const Eigen::VectorXd k2 = a * (x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = a * (x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = a * (x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

std::function<std::unique_ptr<HistoryRhs>()> polynomial_rhs(int degree) {
  return [degree]() -> std::unique_ptr<HistoryRhs> {
    return std::make_unique<FunctionRhs>(
        1, [degree](double t, const Eigen::VectorXd&) { return Eigen::VectorXd::Constant(1, std::pow(t, degree)); });
  };
}

// x' = -x + (h a(x))(t) o mu with a play bank in the loop, so evaluate()
// must leave the committed kernels alone.
class BankRhs final : public HistoryRhs {
 public:
  BankRhs()
      : bank_(TriDomain(-1.0, 1.0), {{RidgeFunction::saturation(), 2}}, Scalarizer::coordinate(0),
              Mixer(Eigen::MatrixXd::Identity(1, 1))),
        mu_(DistributedParameter::constant(TriDomain(-1.0, 1.0), 2, 0.8)) {}
  int dimension() const override { return 1; }
  void start(double t0, const Eigen::VectorXd& x0) override { bank_.start(t0, x0); }
  Eigen::VectorXd evaluate(double t, const Eigen::VectorXd& x) override {
    const Eigen::VectorXd y = with_provisional(bank_, t, x, [&] { return apply_H(bank_, mu_); });
    return -x + y + Eigen::VectorXd::Constant(1, std::sin(3.0 * t));
  }
  void commit(double t, const Eigen::VectorXd& x) override { bank_.advance(t, x); }
  const OperatorBank& bank() const { return bank_; }

 private:
  OperatorBank bank_;
  DistributedParameter mu_;
};

}  // namespace

TEST_CASE("Adams weights satisfy the order conditions") {
  for (int steps = 1; steps <= 4; ++steps) {
    const auto w = PcScheme::bashforth(steps);
    REQUIRE(w.size() == static_cast<std::size_t>(steps));
    for (int d = 0; d < steps; ++d) {
      double s = 0.0;
      for (int i = 0; i < steps; ++i) s += w[static_cast<std::size_t>(i)] * std::pow(-i, d);
      CHECK(s == doctest::Approx(1.0 / (d + 1)));
    }
  }
  for (int q = 1; q <= 4; ++q) {
    const auto w = PcScheme::moulton(q);
    for (int d = 0; d < q; ++d) {
      double s = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::pow(1.0 - static_cast<double>(i), d);
      CHECK(s == doctest::Approx(1.0 / (d + 1)));
    }
  }
  CHECK_THROWS_AS((void)PcScheme::adams(3), Error);
}

TEST_CASE("trivial trajectories") {
  FunctionRhs zero(2, [](double, const Eigen::VectorXd& x) { return Eigen::VectorXd::Zero(x.size()); });
  for (int p : {1, 2, 4}) {
    const Eigen::VectorXd x0 = (Eigen::VectorXd(2) << 0.3, -1.2).finished();
    const auto traj = integrate(x0, zero, PcScheme::adams(p), 0.1, 2.0);
    CHECK(traj.size() == 21);
    for (const auto& x : traj.states()) CHECK((x - x0).norm() == 0.0);
    const auto z = integrate(Eigen::VectorXd::Zero(2), zero, PcScheme::adams(p), 0.1, 2.0);
    for (const auto& x : z.states()) CHECK(x.norm() == 0.0);
  }
}

TEST_CASE("linear decay at second order") {
  FunctionRhs f(1, [](double, const Eigen::VectorXd& x) { return Eigen::VectorXd(-x); });
  const auto traj = integrate(Eigen::VectorXd::Ones(1), f, PcScheme::adams(2), 0.01, 1.0);
  CHECK(std::abs(traj.back()[0] - std::exp(-1.0)) <= 1e-4);
}

TEST_CASE("harmonic oscillator keeps its energy") {
  FunctionRhs f(2, [](double, const Eigen::VectorXd& x) { return Eigen::Vector2d(x[1], -x[0]).eval(); });
  const Eigen::VectorXd x0 = Eigen::Vector2d(1.0, 0.5);
  const auto traj = integrate(x0, f, PcScheme::adams(4), 1e-3, 10.0);
  CHECK(std::abs(traj.back().squaredNorm() - x0.squaredNorm()) <= 1e-6);
  CHECK(traj.times().back() == doctest::Approx(10.0));
}

TEST_CASE("agrees with a classical RK4 reference") {
  gen::Rng r(61);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd a = gen::hurwitz(r, 3);
    const Eigen::VectorXd x0 = gen::vector(r, 3);
    FunctionRhs f(3, [&](double, const Eigen::VectorXd& x) { return Eigen::VectorXd(a * x); });
    const auto traj = integrate(x0, f, PcScheme::adams(4), 1e-3, 2.0);
    CHECK((traj.back() - rk4(a, x0, 1e-4, 20000)).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("integro-differential benchmark converges at the scheme order") {
  CHECK(IntegroBenchmark::exact(0.0) == 0.0);
  // residual of the closed form: u' + 2u + 5 int u - 1
  for (double x : {0.1, 0.7, 1.9}) {
    const double e = 1e-5;
    const double du = (IntegroBenchmark::exact(x + e) - IntegroBenchmark::exact(x - e)) / (2 * e);
    CHECK(std::abs(du + 2 * IntegroBenchmark::exact(x) + 5 * IntegroBenchmark::exact_integral(x) - 1.0) <= 1e-8);
  }
  const auto make = []() -> std::unique_ptr<HistoryRhs> { return std::make_unique<IntegroBenchmark>(); };
  const auto exact = [](double x) { return Eigen::VectorXd::Constant(1, IntegroBenchmark::exact(x)); };
  const std::vector<double> steps{4e-3, 2e-3, 1e-3, 5e-4};
  const auto p2 = order_check(make, Eigen::VectorXd::Zero(1), exact, PcScheme::adams(2), steps, 2.0);
  const auto p4 = order_check(make, Eigen::VectorXd::Zero(1), exact, PcScheme::adams(4), steps, 2.0);
  CHECK(p2.slope >= 1.7);
  CHECK(p2.slope <= 2.3);
  CHECK(p4.slope >= 3.5);
  CHECK(p4.slope <= 4.5);
  CHECK_FALSE(p2.exact);

  IntegroBenchmark rhs;
  (void)integrate(Eigen::VectorXd::Zero(1), rhs, PcScheme::adams(4), 1e-3, 2.0);
  CHECK(std::abs(rhs.committed_integral() - IntegroBenchmark::exact_integral(2.0)) <= 1e-10);
}

TEST_CASE("polynomial right-hand sides") {
  const auto exact_for = [](int degree) {
    return [degree](double t) { return Eigen::VectorXd::Constant(1, std::pow(t, degree + 1) / (degree + 1)); };
  };
  const std::vector<double> steps{0.1, 0.05, 0.025};
  CHECK(order_check(polynomial_rhs(0), Eigen::VectorXd::Zero(1), exact_for(0), PcScheme::adams(1), steps, 1.0).exact);
  for (int p : {2, 4}) {
    for (int d : {0, 1}) {
      CHECK(order_check(polynomial_rhs(d), Eigen::VectorXd::Zero(1), exact_for(d), PcScheme::adams(p), steps, 1.0).exact);
    }
  }
  // the p = 4 start ramps up through the trapezoid, so quadratics leave a
  // small sub-grid error
  const auto q = order_check(polynomial_rhs(2), Eigen::VectorXd::Zero(1), exact_for(2), PcScheme::adams(4), steps, 1.0);
  CHECK_FALSE(q.exact);
  CHECK(q.errors[0] <= 1e-7);
}

TEST_CASE("history right-hand sides: determinism, causality, replay-safe evaluation") {
  BankRhs a;
  BankRhs b;
  const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, 0.2);
  const auto ta = integrate(x0, a, PcScheme::adams(4), 1e-2, 5.0);
  const auto tb = integrate(x0, b, PcScheme::adams(4), 1e-2, 5.0);
  REQUIRE(ta.size() == tb.size());
  for (std::size_t n = 0; n < ta.size(); ++n) CHECK(ta.state(n)[0] == tb.state(n)[0]);
  CHECK(a.bank().history().back_time() == doctest::Approx(5.0));

  BankRhs c;
  Trajectory traj(1e-2);
  PredictorCorrector pc(c, PcScheme::adams(4), 1e-2);
  pc.start(0.0, x0, traj);
  for (int n = 0; n < 100; ++n) pc.step(traj);
  const auto frozen = traj.states();
  const Eigen::VectorXd probe = Eigen::VectorXd::Constant(1, 0.9);
  const Eigen::VectorXd first = c.evaluate(pc.time() + 0.01, probe);
  const Eigen::VectorXd second = c.evaluate(pc.time() + 0.01, probe);
  CHECK(first[0] == second[0]);
  for (int n = 0; n < 100; ++n) pc.step(traj);
  for (std::size_t n = 0; n < frozen.size(); ++n) CHECK(traj.state(n)[0] == frozen[n][0]);
  for (std::size_t n = 0; n < 200; ++n) CHECK(traj.state(n)[0] == ta.state(n)[0]);
}

TEST_CASE("driver errors and trajectory output") {
  FunctionRhs f(1, [](double, const Eigen::VectorXd& x) { return Eigen::VectorXd(-x); });
  CHECK_THROWS_AS((void)integrate(Eigen::VectorXd::Ones(1), f, PcScheme::adams(2), 0.3, 1.0), Error);
  CHECK_THROWS_AS((void)integrate(Eigen::VectorXd::Ones(1), f, PcScheme::adams(2), 0.1, 0.0), Error);
  FunctionRhs blow(1, [](double, const Eigen::VectorXd& x) { return Eigen::VectorXd(x.array().square() * 1e3); });
  try {
    (void)integrate(Eigen::VectorXd::Ones(1), blow, PcScheme::adams(2), 0.1, 50.0);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::nan_detected);
  }

  const auto traj = integrate(Eigen::VectorXd::Ones(1), f, PcScheme::adams(2), 0.5, 1.0);
  CHECK(traj.state_at(0.25)[0] == doctest::Approx(0.5 * (traj.state(0)[0] + traj.state(1)[0])));
  CHECK_THROWS_AS((void)traj.state_at(1.5), Error);
  std::ostringstream out;
  write_csv(out, traj);
  CHECK(out.str().rfind("t,x1\n", 0) == 0);
}
