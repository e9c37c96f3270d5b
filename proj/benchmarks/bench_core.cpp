#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <random>

#include <hystrl/fde_integrator.hpp>
#include <hystrl/integro_benchmark.hpp>
#include <hystrl/lyapunov.hpp>
#include <hystrl/operator_bank.hpp>
#include <hystrl/play_kernel.hpp>
#include <hystrl/rate_experiment.hpp>

using namespace hystrl;

namespace {

void BM_KernelStep(benchmark::State& state) {
  const auto g = RidgeFunction::saturation();
  PlayKernelState k{0.0, 0.0};
  double t = 0.0;
  for (auto _ : state) {
    t += 0.37;
    k = kernel_step(k, g, {-0.4, 0.6}, 2.0 * std::sin(t));
    benchmark::DoNotOptimize(k);
  }
}
BENCHMARK(BM_KernelStep);

void BM_KernelEval(benchmark::State& state) {
  const auto f = oscillatory_input(static_cast<int>(state.range(0)), 2.0, 1);
  const auto g = RidgeFunction::saturation();
  for (auto _ : state) benchmark::DoNotOptimize(kernel_eval(g, {-0.4, 0.6}, f, f.back_time()));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KernelEval)->RangeMultiplier(4)->Range(16, 4096)->Complexity();

// one committed step plus one output evaluation, as in a PECE step
void BM_BankAdvanceApply(benchmark::State& state) {
  const int level = static_cast<int>(state.range(0));
  const TriDomain d(-1.0, 1.0);
  OperatorBank bank(d, {{RidgeFunction::saturation(), level}}, Scalarizer::coordinate(0),
                    Mixer(Eigen::MatrixXd::Identity(1, 1)));
  const auto mu = DistributedParameter::constant(d, level, 1.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
  bank.start(0.0, x);
  double t = 0.0;
  for (auto _ : state) {
    t += 1e-2;
    x[0] = 1.5 * std::sin(3.0 * t);
    bank.advance(t, x);
    benchmark::DoNotOptimize(apply_H(bank, mu));
  }
  state.SetComplexityN(cell_count(level));
}
BENCHMARK(BM_BankAdvanceApply)->DenseRange(2, 6)->Complexity();

void BM_Lyapunov(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return u(rng); });
  a -= (a.eigenvalues().real().maxCoeff() + 1.0) * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd q = Eigen::MatrixXd::Identity(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov_solve(a, q));
}
BENCHMARK(BM_Lyapunov)->DenseRange(2, 8, 2);

void BM_IntegroBenchmark(benchmark::State& state) {
  const auto scheme = PcScheme::adams(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    IntegroBenchmark rhs;
    benchmark::DoNotOptimize(integrate(Eigen::VectorXd::Zero(1), rhs, scheme, 1e-3, 2.0));
  }
}
BENCHMARK(BM_IntegroBenchmark)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
