#include "hystrl_cli/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include <hystrl/closed_loop.hpp>
#include <hystrl/error.hpp>
#include <hystrl/estimator.hpp>
#include <hystrl/fit.hpp>
#include <hystrl/integro_benchmark.hpp>
#include <hystrl/lyapunov.hpp>
#include <hystrl/rate_experiment.hpp>
#include <hystrl/wing.hpp>

namespace hystrl::cli {

namespace {

TriDomain domain_of(const Json& c) {
  const Json& d = c.at("domain");
  return {d.at("s_lo").get<double>(), d.at("s_hi").get<double>()};
}

RidgeFunction gamma_of(const Json& c) {
  const Json& g = c.at("gamma");
  if (g.at("family") == "table") {
    return RidgeFunction::table(g.at("breakpoints").get<std::vector<double>>(), g.at("values").get<std::vector<double>>());
  }
  return RidgeFunction::saturation(g.at("slope").get<double>(), g.at("level").get<double>());
}

PointFunction mu_of(const Json& c) {
  const Json& m = c.at("mu");
  const std::string shape = m.at("shape");
  const double value = m.at("value");
  const double amp = m.at("amplitude");
  if (shape == "constant") return [value](double, double) { return value; };
  if (shape == "linear") return [value, amp](double s1, double) { return value + amp * s1; };
  return [value, amp](double s1, double s2) { return value + amp * std::sin(2.0 * s1) * std::cos(s2); };
}

WingParams wing_of(const Json& c) {
  const Json& w = c.at("wing");
  WingParams p;
  p.m = w.at("m");
  p.x_theta = w.at("x_theta");
  p.I_theta = w.at("I_theta");
  p.k_h = w.at("k_h");
  p.k_theta = w.at("k_theta");
  p.c_h = w.at("c_h");
  p.c_theta = w.at("c_theta");
  p.x_a = w.at("x_a");
  p.gravity = w.at("gravity");
  p.g = w.at("g");
  const Json& e = w.at("flap_effectiveness");
  for (int r = 0; r < 2; ++r) {
    for (int k = 0; k < 2; ++k) p.flap_effectiveness(r, k) = e[r][k].get<double>();
  }
  p.validate();
  return p;
}

WingMode mode_of(const Json& c) { return wing_mode_from_string(c.at("wing").at("mode").get<std::string>()); }

PcScheme scheme_of(const Json& c) {
  PcScheme s = PcScheme::adams(c.at("scheme").at("order"));
  s.startup_substeps = c.at("scheme").at("startup_substeps");
  return s;
}

Eigen::VectorXd vector_of(const Json& arr) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::ostringstream csv_stream() {
  std::ostringstream out;
  out << std::setprecision(12);
  return out;
}

// ---------------------------------------------------------------------------

RunResult run_mesh_info(const Json& c) {
  RunResult r;
  const TriDomain dom = domain_of(c);
  const int level = c.at("level");
  const MeshLevel mesh = refine(dom, level);

  auto out = csv_stream();
  out << "cell_index,address,s1,s2,area\n";
  double sum = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t k = 0; k < mesh.size(); ++k) {
    const double a = std::abs(signed_area(mesh.cell(k)));
    sum += a;
    lo = std::min(lo, a);
    hi = std::max(hi, a);
    const auto addr = CellAddress::from_index(level, static_cast<std::int64_t>(k) + 1);
    out << k + 1 << ',';
    for (auto d : addr.digits()) out << static_cast<int>(d);
    if (addr.digits().empty()) out << "root";
    const Point2 p = mesh.quad_points()[k];
    out << ',' << p.s1 << ',' << p.s2 << ',' << a << '\n';
  }
  r.artifacts.push_back({"mesh.csv", out.str()});

  const double err = std::abs(sum - dom.area());
  r.metrics = {{"level", level},
               {"cells", mesh.size()},
               {"cell_area", mesh.cell_area()},
               {"domain_area", dom.area()},
               {"area_sum", sum},
               {"area_sum_error", err},
               {"cell_area_spread", hi - lo}};
  r.checks["area_sum"] = err <= 1e-12 * dom.area() * std::max<double>(1.0, std::sqrt(static_cast<double>(mesh.size())));
  std::ostringstream rep;
  rep << "level " << level << ": " << mesh.size() << " cells, cell area " << mesh.cell_area() << ", area sum "
      << sum << (r.checks["area_sum"].get<bool>() ? " (OK)" : " (MISMATCH)") << '\n';
  r.report = rep.str();
  return r;
}

RunResult run_approx_error(const Json& c) {
  RunResult r;
  const TriDomain dom = domain_of(c);
  const Json& in = c.at("input");
  const auto f = oscillatory_input(in.at("segments"), in.at("amplitude"), c.at("seed").get<std::uint64_t>(),
                                   in.at("dt"));
  RateOptions opt;
  opt.fine_level = c.at("fine_level");
  opt.levels = c.at("levels").get<std::vector<int>>();
  opt.oversample = c.at("oversample");
  opt.subsamples_per_segment = c.at("subsamples_per_segment");
  const RateResult res = rate_experiment(gamma_of(c), f, mu_of(c), dom, opt);

  auto rates = csv_stream();
  write_csv(rates, res);
  r.artifacts.push_back({"rates.csv", rates.str()});
  auto series = csv_stream();
  series << "t,y_fine\n";
  for (std::size_t n = 0; n < res.times.size(); ++n) series << res.times[n] << ',' << res.fine_output[n] << '\n';
  r.artifacts.push_back({"fine_output.csv", series.str()});

  Json levels = Json::array();
  Json errors = Json::array();
  Json constants = Json::array();
  bool decreasing = true;
  double cmin = std::numeric_limits<double>::infinity();
  double cmax = 0.0;
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const auto& row = res.rows[i];
    levels.push_back(row.level);
    errors.push_back(row.error);
    constants.push_back(row.constant);
    cmin = std::min(cmin, row.constant);
    cmax = std::max(cmax, row.constant);
    if (i > 0 && !(row.error < res.rows[i - 1].error)) decreasing = false;
  }
  r.metrics = {{"fine_level", res.fine_level}, {"levels", levels},   {"errors", errors},
               {"constants", constants},       {"slope", res.slope}, {"constant_spread", cmax / cmin},
               {"strictly_decreasing", decreasing}, {"samples", res.samples}};
  std::ostringstream rep;
  rep << "J = " << res.fine_level << ", " << res.samples << " samples\n";
  for (const auto& row : res.rows) {
    rep << "  j = " << row.level << "  e_j = " << row.error << "  C_j = " << row.constant << '\n';
  }
  rep << "slope " << res.slope << ", C_j spread " << cmax / cmin << '\n';
  r.report = rep.str();
  return r;
}

RunResult run_integrate_benchmark(const Json& c) {
  RunResult r;
  const auto steps = c.at("steps").get<std::vector<double>>();
  const double T = c.at("horizon");
  auto make = [] { return std::make_unique<IntegroBenchmark>(); };
  auto exact = [](double x) { return Eigen::VectorXd::Constant(1, IntegroBenchmark::exact(x)); };

  auto table = csv_stream();
  table << "order,step,error\n";
  std::ostringstream rep;
  int top = 1;
  for (const auto& pj : c.at("orders")) {
    const int p = pj;
    top = std::max(top, p);
    PcScheme s = PcScheme::adams(p);
    if (p == 4) s.startup_substeps = c.at("startup_substeps");
    const OrderCheck oc = order_check(make, Eigen::VectorXd::Zero(1), exact, s, steps, T);
    for (std::size_t i = 0; i < oc.steps.size(); ++i) table << p << ',' << oc.steps[i] << ',' << oc.errors[i] << '\n';
    const std::string key = "p" + std::to_string(p);
    r.metrics["slope_" + key] = oc.slope;
    r.metrics["errors_" + key] = oc.errors;
    r.metrics["exact_" + key] = oc.exact;
    rep << "p = " << p << ": slope " << oc.slope << (oc.exact ? " (errors at rounding level)" : "") << '\n';
  }
  r.metrics["steps"] = steps;
  r.artifacts.push_back({"order.csv", table.str()});

  IntegroBenchmark rhs;
  PcScheme s = PcScheme::adams(top);
  if (top == 4) s.startup_substeps = c.at("startup_substeps");
  const Trajectory traj = integrate(Eigen::VectorXd::Zero(1), rhs, s, steps.back(), T);
  auto sol = csv_stream();
  sol << "x,u,exact,error\n";
  for (std::size_t n = 0; n < traj.size(); ++n) {
    const double x = traj.times()[n];
    const double u = traj.states()[n][0];
    const double e = IntegroBenchmark::exact(x);
    sol << x << ',' << u << ',' << e << ',' << u - e << '\n';
  }
  r.artifacts.push_back({"solution.csv", sol.str()});
  r.metrics["integral_error"] = std::abs(rhs.committed_integral() - IntegroBenchmark::exact_integral(T));
  r.report = rep.str();
  return r;
}

RunResult run_simulate_plant(const Json& c) {
  RunResult r;
  const TriDomain dom = domain_of(c);
  const WingParams wp = wing_of(c);
  const WingMode mode = mode_of(c);
  const int level = c.at("level");
  const RoboticForm robotic = wing_model(wp, mode);
  OperatorBank bank(dom, {{gamma_of(c), level}}, pitch_scalarizer(), Mixer(Eigen::MatrixXd::Ones(1, 1)));
  const auto mu = project_analytic(mu_of(c), dom, level, std::min(level + 2, kDefaultMaxLevel));
  const double amp = c.at("forcing").at("amplitude");
  const double w = c.at("forcing").at("frequency");
  RoboticPlant plant(robotic, bank, mu, [wp, amp, w](double t, const Eigen::VectorXd&, const Eigen::VectorXd&) {
    const Eigen::Vector2d beta(amp * std::sin(w * t), amp * std::cos(w * t));
    return Eigen::VectorXd(flap_forcing(wp, beta));
  });
  const Eigen::VectorXd x0 = vector_of(c.at("x0"));
  const Trajectory traj = integrate(x0, plant, scheme_of(c), c.at("step"), c.at("horizon"));

  const double e0 = wing_energy(wp, mode, x0.head<2>(), x0.tail<2>());
  double drift = 0.0;
  double sup = 0.0;
  double theta = 0.0;
  auto out = csv_stream();
  out << "t,h,theta,h_dot,theta_dot,tau1,tau2,energy\n";
  for (std::size_t n = 0; n < traj.size(); ++n) {
    const Eigen::VectorXd& x = traj.states()[n];
    const double e = wing_energy(wp, mode, x.head<2>(), x.tail<2>());
    drift = std::max(drift, std::abs(e - e0));
    sup = std::max(sup, x.norm());
    theta = std::max(theta, std::abs(x[1]));
    const Eigen::VectorXd& u = traj.inputs()[n];
    out << traj.times()[n];
    for (int i = 0; i < 4; ++i) out << ',' << x[i];
    for (Eigen::Index i = 0; i < 2; ++i) out << ',' << (u.size() > i ? u[i] : 0.0);
    out << ',' << e << '\n';
  }
  if (!traj.back().allFinite()) throw Error(Errc::run_diverged, "plant state is not finite");
  r.artifacts.push_back({"trajectory.csv", out.str()});
  r.metrics = {{"energy_initial", e0},
               {"energy_drift_abs", drift},
               {"energy_drift_rel", e0 > 0.0 ? drift / e0 : drift},
               {"sup_norm", sup},
               {"max_abs_theta", theta},
               {"final_state", to_json(traj.back())},
               {"steps", traj.size() - 1}};
  r.checks["finite"] = traj.back().allFinite();
  std::ostringstream rep;
  rep << to_string(mode) << " wing, " << traj.size() - 1 << " steps, energy drift " << drift / std::max(e0, 1e-300)
      << " relative, max |theta| " << theta << '\n';
  r.report = rep.str();
  return r;
}

// Multi-sine per input channel, phases drawn from the seed.
Signal multisine(const Json& c, int channels) {
  const Json& in = c.at("input");
  const double amp = in.at("amplitude");
  const double base = in.at("base_frequency");
  const int tones = in.at("tones");
  std::mt19937_64 rng(c.at("seed").get<std::uint64_t>());
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  Eigen::MatrixXd ph(channels, tones);
  for (int i = 0; i < channels; ++i) {
    for (int k = 0; k < tones; ++k) ph(i, k) = phase(rng);
  }
  return [=](double t) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(channels);
    for (int i = 0; i < channels; ++i) {
      for (int k = 0; k < tones; ++k) v[i] += amp * std::sin(base * (k + 1) * t + ph(i, k));
    }
    return v;
  };
}

struct IdentifySetup {
  FeedbackTransform tf;
  DistributedParameter mu_star;
  EstimatorOptions options;
  Signal u;
};

IdentifySetup identify_setup(const Json& c) {
  const TriDomain dom = domain_of(c);
  const RoboticForm robotic = wing_model(wing_of(c), mode_of(c));
  const Eigen::MatrixXd g0 = c.at("g0").get<double>() * Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd g1 = c.at("g1").get<double>() * Eigen::MatrixXd::Identity(2, 2);
  IdentifySetup s{regulator_transform(robotic, g0, g1),
                  project_analytic(mu_of(c), dom, c.at("plant_level"), c.at("oversample")),
                  {},
                  multisine(c, 2)};
  s.options.state = update_state_from_string(c.at("update").get<std::string>());
  s.options.gain = c.at("gain");
  const double q = c.at("weight_q");
  if (q > 0.0) {
    s.options.weight = lyapunov_solve(s.tf.core.A, q * Eigen::MatrixXd::Identity(4, 4)).P;
  }
  return s;
}

IdentifyRecord identify_at(const Json& c, const IdentifySetup& s, int level) {
  const TriDomain dom = domain_of(c);
  const RidgeFunction gamma = gamma_of(c);
  OperatorBank plant_bank(dom, {{gamma, c.at("plant_level").get<int>()}}, pitch_scalarizer(), s.tf.mixer);
  OperatorBank est_bank(dom, {{gamma, level}}, pitch_scalarizer(), s.tf.mixer);
  const DistributedParameter mu0 = est_bank.zero_parameter();
  IdentificationSystem sys(s.tf.core, plant_bank, s.mu_star, est_bank, s.u, s.options);
  IdentifyOptions io;
  io.scheme = scheme_of(c);
  io.step = c.at("step");
  io.horizon = c.at("horizon");
  auto rec = identify(sys, vector_of(c.at("x0")), vector_of(c.at("x_hat0")), mu0, io);
  for (double v : rec.x_tilde_norm) {
    if (!std::isfinite(v)) throw Error(Errc::run_diverged, "estimator diverged");
  }
  return rec;
}

RunResult run_identify(const Json& c) {
  RunResult r;
  const IdentifySetup s = identify_setup(c);
  const IdentifyRecord rec = identify_at(c, s, c.at("estimator_level"));

  const std::size_t n = rec.x_tilde_norm.size();
  const double window = c.at("mismatch_window");
  const auto w = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(window * static_cast<double>(n - 1))));
  double m_first = 0.0;
  double m_last = 0.0;
  double x_tail = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k <= w) m_first = std::max(m_first, rec.output_mismatch[k]);
    if (k + w >= n - 1) {
      m_last = std::max(m_last, rec.output_mismatch[k]);
      x_tail = std::max(x_tail, rec.x_tilde_norm[k]);
    }
  }
  const double x0 = rec.x_tilde_norm.front();
  const double xT = rec.x_tilde_norm.back();
  r.metrics = {{"x_tilde_initial", x0},
               {"x_tilde_final", xT},
               {"x_tilde_ratio", x0 > 0.0 ? xT / x0 : 0.0},
               {"x_tilde_tail_sup_ratio", x0 > 0.0 ? x_tail / x0 : 0.0},
               {"mismatch_initial", m_first},
               {"mismatch_final", m_last},
               {"mismatch_reduction", m_last > 0.0 ? m_first / m_last : std::numeric_limits<double>::infinity()},
               {"mu_tilde_initial", rec.mu_tilde_norm.front()},
               {"mu_tilde_final", rec.mu_tilde_norm.back()},
               {"estimator_level", rec.estimator_level}};
  auto out = csv_stream();
  write_csv(out, rec);
  r.artifacts.push_back({"identify.csv", out.str()});
  auto mu = csv_stream();
  write_csv(mu, rec.final_mu_hat);
  r.artifacts.push_back({"mu_hat.csv", mu.str()});

  std::ostringstream rep;
  rep << "|X~| " << x0 << " -> " << xT << " (ratio " << xT / x0 << "), mismatch reduced " << m_first / m_last
      << "x\n";

  const auto levels = c.at("sweep_levels").get<std::vector<int>>();
  if (!levels.empty()) {
    const int ref_level = c.at("reference_level");
    const IdentifyRecord ref = identify_at(c, s, ref_level);
    Json sups = Json::array();
    bool monotone = true;
    double prev = std::numeric_limits<double>::infinity();
    auto sweep = csv_stream();
    sweep << "level,sup_x_hat_diff\n";
    for (int j : levels) {
      const IdentifyRecord rj = identify_at(c, s, j);
      double sup = 0.0;
      for (std::size_t k = 0; k < rj.x_hat.size(); ++k) sup = std::max(sup, (rj.x_hat[k] - ref.x_hat[k]).norm());
      sups.push_back(sup);
      if (!(sup < prev)) monotone = false;
      prev = sup;
      sweep << j << ',' << sup << '\n';
      rep << "  sweep j = " << j << ": sup |X^_j - X^_" << ref_level << "| = " << sup << '\n';
    }
    r.artifacts.push_back({"sweep.csv", sweep.str()});
    r.metrics["sweep_levels"] = levels;
    r.metrics["sweep_reference_level"] = ref_level;
    r.metrics["sweep_sup"] = sups;
    r.metrics["sweep_monotone"] = monotone;
  }
  r.report = rep.str();
  return r;
}

RunResult run_control_wing(const Json& c) {
  RunResult r;
  const TriDomain dom = domain_of(c);
  const RidgeFunction gamma = gamma_of(c);
  const RoboticForm robotic = wing_model(wing_of(c), mode_of(c));
  const Json& rj = c.at("reference");
  const double ha = rj.at("h_amplitude");
  const double hw = rj.at("h_frequency");
  const double ta = rj.at("theta_amplitude");
  const double tw = rj.at("theta_frequency");
  Reference ref{[=](double t) { return Eigen::Vector2d(ha * std::sin(hw * t), ta * std::sin(tw * t)).eval(); },
                [=](double t) { return Eigen::Vector2d(ha * hw * std::cos(hw * t), ta * tw * std::cos(tw * t)).eval(); },
                [=](double t) {
                  return Eigen::Vector2d(-ha * hw * hw * std::sin(hw * t), -ta * tw * tw * std::sin(tw * t)).eval();
                }};
  const Eigen::MatrixXd g0 = c.at("g0").get<double>() * Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd g1 = c.at("g1").get<double>() * Eigen::MatrixXd::Identity(2, 2);
  const FeedbackTransform tf = tracking_transform(robotic, ref, g0, g1);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(4, 4);
  Q.topLeftCorner(2, 2) = c.at("q_position").get<double>() * Eigen::MatrixXd::Identity(2, 2);
  Q.bottomRightCorner(2, 2) = c.at("q_velocity").get<double>() * Eigen::MatrixXd::Identity(2, 2);
  const LyapunovPair pair = lyapunov_solve(tf.core.A, Q);

  const int lp = c.at("plant_level");
  const int n = c.at("control_level");
  const auto mu_star = project_analytic(mu_of(c), dom, lp, c.at("oversample"));
  OperatorBank plant_bank(dom, {{gamma, lp}}, pitch_scalarizer(), tf.mixer);
  OperatorBank control_bank(dom, {{gamma, n}}, pitch_scalarizer(), tf.mixer);
  SlidingConfig cfg{c.at("k"), c.at("epsilon"), n};

  // a priori proxy for |d|: bound(gamma) sqrt(area) |(I - Pi^n) mu*| |b(0)|
  const DistributedParameter coarse = n <= lp ? prolong(restrict(mu_star, n), lp) : mu_star;
  const double detail = p_norm(mu_star - coarse);
  const Eigen::MatrixXd b0 = tf.mixer(tf.physical(0.0, Eigen::VectorXd::Zero(4)));
  const double d_proxy = gamma.bound() * std::sqrt(dom.area()) * detail * b0.norm();

  ClosedLoopSystem sys(tf.core, tf.physical, plant_bank, mu_star, control_bank, pair, cfg, c.at("adaptation_gain"));
  std::mt19937_64 rng(c.at("seed").get<std::uint64_t>());
  std::normal_distribution<double> normal;
  Eigen::VectorXd x0(4);
  for (int i = 0; i < 4; ++i) x0[i] = normal(rng);
  x0 *= c.at("x0_norm").get<double>() / x0.norm();

  ClosedLoopOptions opt;
  opt.scheme = scheme_of(c);
  opt.step = c.at("step");
  opt.horizon = c.at("horizon");
  opt.tail_fraction = c.at("tail_fraction");
  opt.chatter_threshold = c.at("chatter_threshold");
  opt.dissipation_slack = c.at("dissipation_slack");
  const ClosedLoopRecord rec = closed_loop(sys, x0, control_bank.zero_parameter(), opt);
  const auto& m = rec.metrics;

  r.metrics = {{"tail_sup", m.tail_sup},
               {"ultimate_constant", m.ultimate_constant},
               {"chatter_rate", m.chatter_rate},
               {"chattering", m.chattering},
               {"dissipation_violation_rate", m.dissipation_violation_rate},
               {"dissipation_rate", 1.0 - m.dissipation_violation_rate},
               {"residual_sup", m.residual_sup},
               {"d_bound_proxy", d_proxy},
               {"final_x_norm", m.final_x_norm},
               {"final_mu_tilde_norm", m.final_mu_tilde_norm},
               {"initial_x", to_json(x0)},
               {"epsilon", cfg.epsilon},
               {"k", cfg.k},
               {"step", opt.step}};
  r.checks["k_exceeds_d_bound"] = cfg.k > d_proxy;
  r.checks["dissipation_inequality"] = 1.0 - m.dissipation_violation_rate >= c.at("dissipation_rate_min").get<double>();

  auto out = csv_stream();
  write_csv(out, rec);
  r.artifacts.push_back({"closed_loop.csv", out.str()});
  auto mu = csv_stream();
  write_csv(mu, rec.final_mu_hat);
  r.artifacts.push_back({"mu_hat.csv", mu.str()});

  std::ostringstream rep;
  rep << "eps " << cfg.epsilon << ", t_h " << opt.step << ": tail sup |X| " << m.tail_sup << " (C_ub "
      << m.ultimate_constant << "), chatter " << m.chatter_rate << "/s" << (m.chattering ? " CHATTERING" : "")
      << ", dissipation holds at " << 100.0 * (1.0 - m.dissipation_violation_rate) << "% of steps\n";
  r.report = rep.str();
  return r;
}

}  // namespace

bool RunResult::checks_passed() const {
  for (const auto& [name, ok] : checks.items()) {
    if (!ok.get<bool>()) return false;
  }
  return true;
}

RunResult run_experiment(const Json& config) {
  const std::string kind = config.at("kind");
  RunResult r;
  if (kind == "mesh-info") {
    r = run_mesh_info(config);
  } else if (kind == "approx-error") {
    r = run_approx_error(config);
  } else if (kind == "integrate-benchmark") {
    r = run_integrate_benchmark(config);
  } else if (kind == "simulate-plant") {
    r = run_simulate_plant(config);
  } else if (kind == "identify") {
    r = run_identify(config);
  } else if (kind == "control-wing") {
    r = run_control_wing(config);
  } else {
    throw Error(Errc::config_invalid, "unknown experiment kind '" + kind + "'");
  }
  r.kind = kind;
  return r;
}

Json make_summary(const RunResult& result, double wall_clock_s) {
  return {{"kind", result.kind},
          {"metrics", result.metrics},
          {"checks", result.checks},
          {"wall_clock_s", wall_clock_s},
          {"tool_version", kToolVersion}};
}

void write_run(const RunResult& result, const Json& config, const std::filesystem::path& out, double wall_clock_s) {
  std::filesystem::create_directories(out);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream f(out / name, std::ios::binary);
    if (!f) throw Error(Errc::config_invalid, "cannot write " + (out / name).string());
    f << text;
  };
  put("config.json", config.dump(2) + "\n");
  for (const auto& a : result.artifacts) put(a.name, a.content);
  put("summary.json", make_summary(result, wall_clock_s).dump(2) + "\n");
}

std::vector<MetricDelta> compare_summaries(const Json& a, const Json& b) {
  if (!a.contains("kind") || !b.contains("kind") || !a.contains("metrics") || !b.contains("metrics")) {
    throw Error(Errc::config_invalid, "not a run summary");
  }
  if (a.at("kind") != b.at("kind")) {
    throw Error(Errc::config_invalid, "summaries are of different kinds: " + a.at("kind").dump() + " vs " +
                                          b.at("kind").dump());
  }
  std::vector<std::string> names;
  for (const auto& [k, v] : a.at("metrics").items()) names.push_back(k);
  for (const auto& [k, v] : b.at("metrics").items()) {
    if (!a.at("metrics").contains(k)) names.push_back(k);
  }
  auto scalar = [](const Json& v, double& x) {
    if (v.is_number()) {
      x = v.get<double>();
      return true;
    }
    if (v.is_boolean()) {
      x = v.get<bool>() ? 1.0 : 0.0;
      return true;
    }
    return false;
  };
  std::vector<MetricDelta> rows;
  for (const auto& name : names) {
    MetricDelta d;
    d.name = name;
    d.a = a.at("metrics").value(name, Json());
    d.b = b.at("metrics").value(name, Json());
    d.equal = d.a == d.b;
    double xa = 0.0;
    double xb = 0.0;
    if (scalar(d.a, xa) && scalar(d.b, xb)) d.delta = xb - xa;
    rows.push_back(std::move(d));
  }
  return rows;
}

std::string format_comparison(const std::vector<MetricDelta>& rows) {
  std::size_t width = 6;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "metric" << "  " << std::setw(24) << "a" << "  "
      << std::setw(24) << "b" << "  delta\n";
  for (const auto& r : rows) {
    auto cell = [](const Json& v) {
      std::string s = v.is_null() ? "-" : v.dump();
      if (s.size() > 24) s = s.substr(0, 21) + "...";
      return s;
    };
    out << std::left << std::setw(static_cast<int>(width)) << r.name << "  " << std::setw(24) << cell(r.a) << "  "
        << std::setw(24) << cell(r.b) << "  ";
    if (r.a.is_number() || r.a.is_boolean()) {
      out << std::setprecision(6) << r.delta;
    } else {
      out << (r.equal ? "=" : "differs");
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace hystrl::cli
