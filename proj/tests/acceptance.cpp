// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--criterion ID]...
//
// IDs are 1..8; criterion 5 also has the sub-ids 5.mismatch, 5.sweep and
// 5.final. Exit status is 0 when every selected line passes.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <hystrl/error.hpp>
#include <hystrl/fde_integrator.hpp>
#include <hystrl/fit.hpp>
#include <hystrl/integro_benchmark.hpp>
#include <hystrl/lyapunov.hpp>
#include <hystrl/plant.hpp>
#include <hystrl/play_kernel.hpp>
#include <hystrl/wing.hpp>
#include <hystrl_cli/config.hpp>
#include <hystrl_cli/experiments.hpp>

#include "support/generators.hpp"

using namespace hystrl;

namespace {

struct Line {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

cli::Json run_config(const std::string& name, const std::vector<std::string>& sets = {},
                     std::optional<std::uint64_t> seed = {}) {
  const cli::Json user = cli::load_json_file(std::string(HYSTRL_CONFIG_DIR) + "/" + name + ".json");
  const cli::Json c = cli::resolve_config(user.at("kind").get<std::string>(), user, sets, seed);
  const cli::RunResult r = cli::run_experiment(c);
  cli::Json out{{"metrics", r.metrics}, {"checks", r.checks}};
  return out;
}

// ---- 1 -------------------------------------------------------------------

Line operator_rate() {
  Stopwatch sw;
  const cli::Json m = run_config("approx-error").at("metrics");
  const double t = sw.seconds();
  const double slope = m.at("slope");
  const double spread = m.at("constant_spread");
  const bool decreasing = m.at("strictly_decreasing");
  const bool pass = m.at("fine_level") == 7 && decreasing && slope >= -2.4 && slope <= -1.6 && spread <= 4.0 &&
                    t <= 60.0;
  return {pass, "e_j " + std::string(decreasing ? "strictly decreasing" : "NOT decreasing") + ", slope " +
                    fmt(slope) + " in [-2.4, -1.6], C_j spread " + fmt(spread) + " <= 4, " + fmt(t) +
                    " s <= 60 s"};
}

// ---- 2 -------------------------------------------------------------------

// independent max/min replay over the breakpoint values
double replay(const RidgeFunction& g, ThresholdPair s, const std::vector<double>& v, std::size_t upto) {
  double k = std::min(std::max(0.0, g(v[0] - s.s2)), g(v[0] - s.s1));
  for (std::size_t n = 1; n <= upto; ++n) {
    if (v[n] > v[n - 1]) k = std::max(k, g(v[n] - s.s2));
    if (v[n] < v[n - 1]) k = std::min(k, g(v[n] - s.s1));
    k = std::min(std::max(k, g(v[n] - s.s2)), g(v[n] - s.s1));
  }
  return k;
}

PiecewiseLinearInput resample(const PiecewiseLinearInput& f, int per_segment) {
  std::vector<double> t{f.times().front()};
  std::vector<double> v{f.values().front()};
  for (std::size_t i = 1; i < f.size(); ++i) {
    const double a = f.times()[i - 1];
    const double b = f.times()[i];
    for (int k = 1; k < per_segment; ++k) {
      const double tk = a + (b - a) * k / per_segment;
      if (tk <= t.back() || tk >= b) continue;
      t.push_back(tk);
      v.push_back(f.at(tk));
    }
    t.push_back(b);
    v.push_back(f.values()[i]);
  }
  return {t, v};
}

Line kernel_suite() {
  Stopwatch sw;
  gen::Rng r(2024);
  long rate = 0;
  long causal = 0;
  long envelope = 0;
  long oracle = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto g = gen::ridge(r);
    const auto f = gen::input(r, 20, 3.0);
    std::vector<double> warped{r.uniform(-5.0, 5.0)};
    for (std::size_t i = 1; i < f.size(); ++i) warped.push_back(warped.back() + r.uniform(1e-3, 10.0));
    const PiecewiseLinearInput fw(warped, f.values());
    const auto fine = resample(f, 16);
    for (int k = 0; k < 50; ++k) {
      const auto s = gen::threshold(r, -3.0, 3.0);
      const std::size_t cut = static_cast<std::size_t>(r.integer(0, static_cast<int>(f.size()) - 2));
      PiecewiseLinearInput trunc = f;
      trunc.truncate(cut + 1);
      for (std::size_t i = 0; i < f.size(); ++i) {
        const double t = f.times()[i];
        const double v = kernel_eval(g, s, f, t);
        if (v != kernel_eval(g, s, fw, warped[i])) ++rate;
        if (i <= cut && v != kernel_eval(g, s, trunc, t)) ++causal;
        if (!(g(f.values()[i] - s.s2) <= v && v <= g(f.values()[i] - s.s1))) ++envelope;
        if (v != kernel_eval(g, s, fine, t) || v != replay(g, s, f.values(), i)) ++oracle;
      }
    }
  }
  const double secs = sw.seconds();
  const bool pass = rate == 0 && causal == 0 && envelope == 0 && oracle == 0 && secs <= 30.0;
  return {pass, "1000 inputs x 50 pairs: mismatches rate " + std::to_string(rate) + ", causality " +
                    std::to_string(causal) + ", envelope " + std::to_string(envelope) + ", resample/replay " +
                    std::to_string(oracle) + " (all must be 0), " + fmt(secs) + " s <= 30 s"};
}

// ---- 3 -------------------------------------------------------------------

// L^2 pairing on one uniform level, written out cell by cell.
double plain_inner(const DistributedParameter& a, const DistributedParameter& b) {
  const auto& x = a.channel(0).values;
  const auto& y = b.channel(0).values;
  double s = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) s += x[k] * y[k];
  return s * a.cell_area(0);
}

Line projection_suite() {
  const TriDomain d(-1.0, 1.0);
  const int fine = 5;
  gen::Rng r(33);
  double idem = 0.0;
  double nest = 0.0;
  double adj = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto mu = gen::parameter(r, d, fine);
    const auto nu = gen::parameter(r, d, fine);
    const int j = r.integer(0, fine);
    const int jp = r.integer(j, fine);
    const auto pj = restrict(mu, j);
    idem = std::max(idem, (restrict(prolong(pj, fine), j).flat() - pj.flat()).cwiseAbs().maxCoeff());
    nest = std::max(nest, (restrict(restrict(mu, jp), j).flat() - pj.flat()).cwiseAbs().maxCoeff());
    adj = std::max(adj, std::abs(plain_inner(prolong(pj, fine), nu) - plain_inner(mu, prolong(restrict(nu, j), fine))));
  }
  const auto lipschitz = [](double s1, double s2) { return std::abs(s1) + 0.5 * std::sin(3.0 * s2); };
  const auto ref = project_analytic(lipschitz, d, 9, 9);
  std::vector<double> js;
  std::vector<double> logs;
  for (int j = 2; j <= 7; ++j) {
    js.push_back(j);
    logs.push_back(std::log2(p_norm(ref - prolong(restrict(ref, j), 9))));
  }
  const double slope = least_squares_slope(js, logs);
  const bool pass = idem <= 1e-12 && nest <= 1e-12 && adj <= 1e-12 && slope <= -0.9;
  return {pass, "idempotence " + fmt(idem) + ", nesting " + fmt(nest) + ", self-adjointness " + fmt(adj) +
                    " (<= 1e-12), |mu - Pi_j mu| slope " + fmt(slope) + " <= -0.9"};
}

// ---- 4 -------------------------------------------------------------------

Line integrator_order() {
  double residual = 0.0;
  for (double x : {0.05, 0.3, 0.8, 1.4, 1.9}) {
    const double e = 1e-5;
    const double du = (IntegroBenchmark::exact(x + e) - IntegroBenchmark::exact(x - e)) / (2 * e);
    const double closed = 0.5 * std::exp(-x) * std::sin(2.0 * x);
    residual = std::max(residual, std::abs(du + 2 * closed + 5 * IntegroBenchmark::exact_integral(x) - 1.0));
    residual = std::max(residual, std::abs(IntegroBenchmark::exact(x) - closed));
  }
  const auto make = []() -> std::unique_ptr<HistoryRhs> { return std::make_unique<IntegroBenchmark>(); };
  const auto exact = [](double x) { return Eigen::VectorXd::Constant(1, IntegroBenchmark::exact(x)); };
  const std::vector<double> steps{4e-3, 2e-3, 1e-3, 5e-4};
  const double p2 = order_check(make, Eigen::VectorXd::Zero(1), exact, PcScheme::adams(2), steps, 2.0).slope;
  const double p4 = order_check(make, Eigen::VectorXd::Zero(1), exact, PcScheme::adams(4), steps, 2.0).slope;

  WingParams w;
  w.c_h = 0.0;
  w.c_theta = 0.0;
  w.gravity = true;
  const TriDomain d(-1.0, 1.0);
  RoboticPlant plant(wing_model(w, WingMode::full),
                     OperatorBank(d, {{RidgeFunction::saturation(), 2}}, pitch_scalarizer(),
                                  Mixer(Eigen::MatrixXd::Ones(1, 1))),
                     DistributedParameter::zeros(d, 2), {});
  const Eigen::Vector4d x0(0.3, 0.5, 0.0, 0.2);
  const auto traj = integrate(x0, plant, PcScheme::adams(4), 1e-4, 10.0);
  const double e0 = wing_energy(w, WingMode::full, x0.head<2>(), x0.tail<2>());
  double drift = 0.0;
  for (const auto& x : traj.states()) {
    drift = std::max(drift, std::abs(wing_energy(w, WingMode::full, x.head(2), x.tail(2)) - e0) / std::abs(e0));
  }
  const bool pass = residual <= 1e-8 && std::abs(p2 - 2.0) <= 0.3 && std::abs(p4 - 4.0) <= 0.5 && drift <= 1e-6;
  return {pass, "closed-form residual " + fmt(residual) + ", slopes p=2 " + fmt(p2) + " (+-0.3), p=4 " + fmt(p4) +
                    " (+-0.5), wing energy drift " + fmt(drift) + " <= 1e-6 relative"};
}

// ---- 5 -------------------------------------------------------------------

const cli::Json& identify_metrics(bool with_sweep) {
  static std::map<bool, cli::Json> cache;
  auto it = cache.find(with_sweep);
  if (it == cache.end()) {
    std::vector<std::string> sets;
    if (!with_sweep) sets.push_back("sweep_levels=[]");
    it = cache.emplace(with_sweep, run_config("identify", sets).at("metrics")).first;
  }
  return it->second;
}

Line identify_mismatch() {
  const auto& m = identify_metrics(false);
  const double red = m.at("mismatch_reduction");
  return {red >= 10.0, "output mismatch reduced " + fmt(red) + "x >= 10x"};
}

Line identify_sweep() {
  const auto& m = identify_metrics(true);
  std::string sups;
  for (const auto& v : m.at("sweep_sup")) sups += (sups.empty() ? "" : ", ") + fmt(v.get<double>());
  const bool monotone = m.at("sweep_monotone");
  const bool levels = m.at("sweep_levels") == cli::Json::array({1, 2, 3, 4}) && m.at("sweep_reference_level") == 6;
  return {monotone && levels, "sup|X^_j - X^_6|, j=1..4: " + sups + (monotone ? " (monotone)" : " (NOT monotone)")};
}

Line identify_final() {
  const auto& m = identify_metrics(false);
  const double ratio = m.at("x_tilde_ratio");
  return {ratio <= 1e-3, "|X~(40)|/|X~(0)| = " + fmt(ratio) + " <= 1e-3"};
}

// ---- 6 -------------------------------------------------------------------

Line controller() {
  std::vector<double> cub;
  double diss = 1.0;
  bool d_bound = true;
  cli::Json smooth;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const cli::Json run = run_config("control-wing-smooth", {}, seed);
    if (seed == 1) smooth = run;
    cub.push_back(run.at("metrics").at("ultimate_constant"));
    diss = std::min(diss, run.at("metrics").at("dissipation_rate").get<double>());
    d_bound = d_bound && run.at("checks").at("k_exceeds_d_bound").get<bool>();
  }
  double mean = 0.0;
  for (double c : cub) mean += c / static_cast<double>(cub.size());
  double dev = 0.0;
  for (double c : cub) dev = std::max(dev, std::abs(c - mean) / mean);

  const cli::Json chatter = run_config("control-wing-chatter");
  const cli::Json wide = run_config("control-wing-wide-layer");
  for (const auto* run : {&chatter, &wide}) {
    diss = std::min(diss, run->at("metrics").at("dissipation_rate").get<double>());
    d_bound = d_bound && run->at("checks").at("k_exceeds_d_bound").get<bool>();
  }
  const auto& a = smooth.at("metrics");
  const auto& b = chatter.at("metrics");
  const auto& c = wide.at("metrics");
  const double eps = a.at("epsilon");
  const double tail_a = a.at("tail_sup");
  const double tail_c = c.at("tail_sup");
  const bool ok_a = !a.at("chattering").get<bool>() && tail_a <= cub.front() * eps * (1.0 + 1e-12) && dev <= 0.2;
  const bool ok_b = b.at("chattering").get<bool>();
  const bool ok_c = !c.at("chattering").get<bool>() && tail_c > tail_a;
  const bool pass = ok_a && ok_b && ok_c && diss >= 0.99 && d_bound && a.at("k") == 20.0;
  return {pass, std::string("(a) ") + (ok_a ? "ok" : "FAIL") + ": no chatter, tail " + fmt(tail_a) + ", C_ub " +
                    fmt(cub.front()) + " (max seed deviation " + fmt(100 * dev) + "% <= 20%); (b) " +
                    (ok_b ? "ok" : "FAIL") + ": chattering " + fmt(b.at("chatter_rate").get<double>()) + "/s; (c) " +
                    (ok_c ? "ok" : "FAIL") + ": no chatter, tail " + fmt(tail_c) + " > " + fmt(tail_a) +
                    "; dissipation >= " + fmt(100 * diss) + "% of steps (>= 99%)"};
}

// ---- 7 -------------------------------------------------------------------

Line lyapunov_corpus() {
  gen::Rng r(7);
  double worst = 0.0;
  int not_spd = 0;
  int failed = 0;
  for (int n = 0; n < 100; ++n) {
    const int m = r.integer(2, 8);
    const Eigen::MatrixXd a = gen::hurwitz(r, m);
    const Eigen::MatrixXd q = r.coin() ? Eigen::MatrixXd::Identity(m, m) : gen::spd(r, m);
    try {
      const auto pair = lyapunov_solve(a, q);
      const Eigen::MatrixXd res = a.transpose() * pair.P + pair.P * a + q;
      worst = std::max(worst, res.cwiseAbs().maxCoeff());
      const Eigen::MatrixXd sym = 0.5 * (pair.P + pair.P.transpose());
      if ((pair.P - pair.P.transpose()).cwiseAbs().maxCoeff() > 0.0 || sym.llt().info() != Eigen::Success) ++not_spd;
    } catch (const Error&) {
      ++failed;
    }
  }
  const bool pass = failed == 0 && not_spd == 0 && worst <= 1e-10;
  return {pass, "100 random Hurwitz systems (n = 2..8): max residual " + fmt(worst) + " <= 1e-10, " +
                    std::to_string(not_spd) + " not SPD, " + std::to_string(failed) + " solver errors"};
}

// ---- 8 -------------------------------------------------------------------

Line transform_soundness() {
  const TriDomain d(-1.0, 1.0);
  const auto mu = project_analytic([](double s1, double s2) { return 1.0 + 0.5 * s1 * s2; }, d, 3, 6);
  const Signal u = [](double t) { return Eigen::Vector2d(0.5 * std::sin(2 * t), -0.3 * std::cos(t)).eval(); };
  const auto bank = [&](const Mixer& b) {
    return OperatorBank(d, {{RidgeFunction::saturation(), 3}}, pitch_scalarizer(), b);
  };
  double worst = 0.0;
  for (auto mode : {WingMode::simplified, WingMode::full}) {
    WingParams p;
    p.x_a = 0.1;
    const auto rob = wing_model(p, mode);
    const auto tr = regulator_transform(rob, 2.0 * Eigen::MatrixXd::Identity(2, 2), 2.0 * Eigen::MatrixXd::Identity(2, 2));
    const Eigen::Vector4d x0(0.2, -0.4, 0.1, 0.3);
    RoboticPlant direct(rob, bank(Mixer(Eigen::MatrixXd::Ones(1, 1))), mu,
                        [&](double t, const Eigen::VectorXd& q, const Eigen::VectorXd& qd) { return tr.tau(t, q, qd, u(t)); });
    GeneralPlant folded(tr.core, bank(tr.mixer), mu, u, tr.physical);
    const auto a = integrate(x0, direct, PcScheme::adams(4), 1e-3, 5.0);
    const auto b = integrate(x0, folded, PcScheme::adams(4), 1e-3, 5.0);
    for (std::size_t n = 0; n < a.size(); ++n) worst = std::max(worst, (a.state(n) - b.state(n)).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-6, "robotic vs first-order wing over 5 s, simplified and full: sup gap " + fmt(worst) +
                             " <= 1e-6"};
}

struct Entry {
  std::string id;
  std::string title;
  std::function<Line()> run;
};

Line criterion5() {
  const Line a = identify_mismatch();
  const Line b = identify_sweep();
  const Line c = identify_final();
  return {a.pass && b.pass && c.pass, "[" + std::string(a.pass ? "ok" : "FAIL") + "] " + a.detail + "; [" +
                                          (b.pass ? "ok" : "FAIL") + "] " + b.detail + "; [" +
                                          (c.pass ? "ok" : "FAIL") + "] " + c.detail};
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> all{
      {"1", "operator approximation rate", operator_rate},
      {"2", "play-kernel property suite", kernel_suite},
      {"3", "projection suite", projection_suite},
      {"4", "integrator order and energy", integrator_order},
      {"5", "estimator", criterion5},
      {"5.mismatch", "estimator output mismatch", identify_mismatch},
      {"5.sweep", "estimator level sweep", identify_sweep},
      {"5.final", "estimator final state error", identify_final},
      {"6", "sliding-mode controller", controller},
      {"7", "Lyapunov synthesis", lyapunov_corpus},
      {"8", "transform soundness", transform_soundness},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      wanted.push_back(argv[++i]);
    } else if (arg == "-h" || arg == "--help") {
      std::cout << "usage: acceptance [--criterion ID]...\nIDs:";
      for (const auto& e : entries()) std::cout << ' ' << e.id;
      std::cout << '\n';
      return 0;
    } else {
      std::cerr << "unknown argument: " << arg << '\n';
      return 2;
    }
  }
  if (wanted.empty()) wanted = {"1", "2", "3", "4", "5", "6", "7", "8"};

  bool all = true;
  for (const auto& id : wanted) {
    const auto it = std::find_if(entries().begin(), entries().end(), [&](const Entry& e) { return e.id == id; });
    if (it == entries().end()) {
      std::cerr << "unknown criterion: " << id << '\n';
      return 2;
    }
    Line line;
    Stopwatch sw;
    try {
      line = it->run();
    } catch (const std::exception& e) {
      line = {false, std::string("error: ") + e.what()};
    }
    all = all && line.pass;
    std::cout << (line.pass ? "PASS" : "FAIL") << "  criterion " << it->id << " (" << it->title << "): " << line.detail
              << "  [" << fmt(sw.seconds()) << " s]" << std::endl;
  }
  return all ? 0 : 1;
}
