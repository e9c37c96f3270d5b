#include "hystrl_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <hystrl/error.hpp>

namespace hystrl::cli {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(Errc::config_invalid, what); }

Json domain_block() { return {{"s_lo", -1.0}, {"s_hi", 1.0}}; }

Json gamma_block() {
  return {{"family", "saturation"}, {"slope", 1.0}, {"level", 1.0},
          {"breakpoints", Json::array()}, {"values", Json::array()}};
}

// smooth: value + amplitude sin(2 s1) cos(s2); linear: value + amplitude s1
Json mu_block(std::string shape, double value, double amplitude) {
  return {{"shape", std::move(shape)}, {"value", value}, {"amplitude", amplitude}};
}

Json scheme_block(int order) { return {{"order", order}, {"startup_substeps", order == 4 ? 16 : 1}}; }

Json wing_block(std::string mode, double damping) {
  return {{"mode", std::move(mode)}, {"m", 1.0}, {"x_theta", 0.2}, {"I_theta", 0.25},
          {"k_h", 1.0}, {"k_theta", 2.0}, {"c_h", damping}, {"c_theta", damping},
          {"x_a", 0.0}, {"gravity", false}, {"g", 9.81},
          {"flap_effectiveness", Json::array({Json::array({1.0, 0.5}), Json::array({-0.3, 1.0})})}};
}

void merge_strict(Json& base, const Json& patch, const std::string& path) {
  if (!patch.is_object()) fail("expected an object at '" + (path.empty() ? std::string("<root>") : path) + "'");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) fail("unknown key '" + key + "'");
    Json& slot = base[it.key()];
    if (slot.is_object() && it.value().is_object()) {
      merge_strict(slot, it.value(), key);
    } else {
      slot = it.value();
    }
  }
}

const Json& need(const Json& j, const char* key) {
  if (!j.contains(key)) fail(std::string("missing key '") + key + "'");
  return j.at(key);
}

double number(const Json& j, const char* key) {
  const Json& v = need(j, key);
  if (!v.is_number()) fail(std::string("'") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(std::string("'") + key + "' must be finite");
  return x;
}

double positive(const Json& j, const char* key) {
  const double x = number(j, key);
  if (!(x > 0.0)) fail(std::string("'") + key + "' must be positive");
  return x;
}

double nonnegative(const Json& j, const char* key) {
  const double x = number(j, key);
  if (x < 0.0) fail(std::string("'") + key + "' must be nonnegative");
  return x;
}

int integer(const Json& j, const char* key, int lo, int hi) {
  const Json& v = need(j, key);
  if (!v.is_number_integer()) fail(std::string("'") + key + "' must be an integer");
  const auto x = v.get<long long>();
  if (x < lo || x > hi) {
    fail(std::string("'") + key + "' must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(x);
}

std::string text(const Json& j, const char* key) {
  const Json& v = need(j, key);
  if (!v.is_string()) fail(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

void check_domain(const Json& c) {
  const Json& d = need(c, "domain");
  if (!(number(d, "s_lo") < number(d, "s_hi"))) fail("domain needs s_lo < s_hi");
}

void check_gamma(const Json& c) {
  const Json& g = need(c, "gamma");
  const std::string family = text(g, "family");
  if (family == "saturation") {
    positive(g, "slope");
    positive(g, "level");
  } else if (family == "table") {
    const Json& b = need(g, "breakpoints");
    const Json& v = need(g, "values");
    if (!b.is_array() || !v.is_array() || b.size() < 2 || b.size() != v.size()) {
      fail("table gamma needs equally long breakpoints/values arrays with at least two entries");
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (!b[i].is_number() || !v[i].is_number()) fail("table gamma entries must be numbers");
      if (i > 0 && !(b[i].get<double>() > b[i - 1].get<double>())) fail("table breakpoints must increase");
      if (i > 0 && v[i].get<double>() < v[i - 1].get<double>()) fail("table values must not decrease");
    }
  } else {
    fail("gamma.family must be 'saturation' or 'table'");
  }
}

void check_mu(const Json& c) {
  const Json& m = need(c, "mu");
  const std::string shape = text(m, "shape");
  if (shape != "constant" && shape != "smooth" && shape != "linear") {
    fail("mu.shape must be 'constant', 'smooth' or 'linear'");
  }
  number(m, "value");
  number(m, "amplitude");
}

void check_scheme(const Json& c) {
  const Json& s = need(c, "scheme");
  const int p = integer(s, "order", 1, 4);
  if (p == 3) fail("scheme.order must be 1, 2 or 4");
  integer(s, "startup_substeps", 1, 1024);
}

void check_wing(const Json& c) {
  const Json& w = need(c, "wing");
  const std::string mode = text(w, "mode");
  if (mode != "simplified" && mode != "full") fail("wing.mode must be 'simplified' or 'full'");
  positive(w, "m");
  number(w, "x_theta");
  positive(w, "I_theta");
  nonnegative(w, "k_h");
  nonnegative(w, "k_theta");
  nonnegative(w, "c_h");
  nonnegative(w, "c_theta");
  number(w, "x_a");
  if (!need(w, "gravity").is_boolean()) fail("'gravity' must be true or false");
  number(w, "g");
  const Json& e = need(w, "flap_effectiveness");
  bool ok = e.is_array() && e.size() == 2;
  for (std::size_t r = 0; ok && r < 2; ++r) {
    ok = e[r].is_array() && e[r].size() == 2 && e[r][0].is_number() && e[r][1].is_number();
  }
  if (!ok) fail("wing.flap_effectiveness must be a 2x2 array of numbers");
}

void check_step(const Json& c) {
  const double h = positive(c, "step");
  const double T = positive(c, "horizon");
  const double n = T / h;
  if (std::abs(n - std::round(n)) > 1e-9 * n) fail("step must divide horizon");
}

void check_levels(const Json& arr, const char* key, int lo, int hi) {
  if (!arr.is_array()) fail(std::string("'") + key + "' must be an array");
  for (const auto& v : arr) {
    if (!v.is_number_integer() || v.get<int>() < lo || v.get<int>() > hi) {
      fail(std::string("'") + key + "' entries must be integers in [" + std::to_string(lo) + ", " +
           std::to_string(hi) + "]");
    }
  }
}

void check_vector(const Json& c, const char* key, std::size_t size) {
  const Json& v = need(c, key);
  if (!v.is_array() || v.size() != size) fail(std::string("'") + key + "' must have " + std::to_string(size) + " entries");
  for (const auto& x : v) {
    if (!x.is_number()) fail(std::string("'") + key + "' entries must be numbers");
  }
}

}  // namespace

const std::vector<KindInfo>& experiment_kinds() {
  static const std::vector<KindInfo> kinds{
      {"mesh-info", "refinement level summary: cell count, areas, quadrature points"},
      {"approx-error", "operator approximation error e_j against a fine level J, slope fit and C_j table"},
      {"integrate-benchmark", "predictor-corrector order study on the integro-differential benchmark"},
      {"simulate-plant", "open-loop wing section with hysteretic lift, energy bookkeeping"},
      {"identify", "online distributed-parameter estimator on the wing-derived plant, level sweep"},
      {"control-wing", "sliding-mode adaptive tracking of the wing section, chattering and ultimate bound"},
  };
  return kinds;
}

bool is_kind(std::string_view kind) {
  for (const auto& k : experiment_kinds()) {
    if (k.name == kind) return true;
  }
  return false;
}

Json default_config(std::string_view kind) {
  Json c;
  c["kind"] = std::string(kind);
  c["seed"] = 1;
  if (kind == "mesh-info") {
    c["domain"] = domain_block();
    c["level"] = 3;
  } else if (kind == "approx-error") {
    c["domain"] = domain_block();
    c["gamma"] = gamma_block();
    c["mu"] = mu_block("smooth", 1.0, 0.5);
    c["fine_level"] = 7;
    c["levels"] = {2, 3, 4, 5};
    c["oversample"] = 2;
    c["subsamples_per_segment"] = 4;
    c["input"] = {{"segments", 100}, {"amplitude", 1.8}, {"dt", 0.1}};
  } else if (kind == "integrate-benchmark") {
    c["orders"] = {2, 4};
    c["steps"] = {4e-3, 2e-3, 1e-3, 5e-4};
    c["horizon"] = 2.0;
    c["startup_substeps"] = 16;
  } else if (kind == "simulate-plant") {
    c["domain"] = domain_block();
    c["gamma"] = gamma_block();
    c["mu"] = mu_block("smooth", 1.0, 0.5);
    c["level"] = 4;
    c["wing"] = wing_block("full", 0.1);
    c["scheme"] = scheme_block(4);
    c["x0"] = {0.3, 0.5, 0.0, 0.2};
    c["step"] = 1e-3;
    c["horizon"] = 10.0;
    c["forcing"] = {{"amplitude", 0.0}, {"frequency", 1.0}};
  } else if (kind == "identify") {
    c["domain"] = domain_block();
    c["gamma"] = gamma_block();
    c["mu"] = mu_block("smooth", 1.0, 0.5);
    c["wing"] = wing_block("simplified", 0.1);
    c["g0"] = 1.0;
    c["g1"] = 2.0;
    c["plant_level"] = 3;
    c["estimator_level"] = 3;
    c["oversample"] = 9;
    c["update"] = "error";
    c["gain"] = 10.0;
    c["weight_q"] = 1.0;
    c["input"] = {{"amplitude", 9.0}, {"base_frequency", 3.0}, {"tones", 3}};
    c["x0"] = {0.0, 0.0, 0.0, 0.0};
    c["x_hat0"] = {0.5, 0.5, 0.0, 0.0};
    c["scheme"] = scheme_block(4);
    c["step"] = 0.005;
    c["horizon"] = 40.0;
    c["mismatch_window"] = 0.1;
    c["sweep_levels"] = {1, 2, 3, 4};
    c["reference_level"] = 6;
  } else if (kind == "control-wing") {
    c["domain"] = domain_block();
    c["gamma"] = gamma_block();
    c["mu"] = mu_block("smooth", 1.0, 0.5);
    c["wing"] = wing_block("full", 0.1);
    c["g0"] = 4.0;
    c["g1"] = 4.0;
    c["q_position"] = 8.0;
    c["q_velocity"] = 4.4;
    c["k"] = 20.0;
    c["epsilon"] = 0.01;
    c["plant_level"] = 5;
    c["control_level"] = 3;
    c["oversample"] = 8;
    c["adaptation_gain"] = 1.0;
    c["reference"] = {{"h_amplitude", 0.2}, {"h_frequency", 1.0}, {"theta_amplitude", 0.3}, {"theta_frequency", 0.7}};
    c["x0_norm"] = 0.1;
    c["scheme"] = scheme_block(4);
    c["step"] = 5e-4;
    c["horizon"] = 10.0;
    c["tail_fraction"] = 0.2;
    c["chatter_threshold"] = 20.0;
    c["dissipation_slack"] = 0.0;
    c["dissipation_rate_min"] = 0.99;
  } else {
    fail("unknown experiment kind '" + std::string(kind) + "'");
  }
  return c;
}

void apply_override(Json& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) fail("override must look like key=value: '" + std::string(assignment) + "'");
  const std::string path(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  Json value = Json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  Json* node = &config;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object() || !node->contains(key)) fail("unknown key '" + path + "'");
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(value);
}

Json resolve_config(std::string_view kind, const Json& user, const std::vector<std::string>& sets,
                    std::optional<std::uint64_t> seed) {
  Json c = default_config(kind);
  if (!user.is_null()) {
    if (user.contains("kind") && user.at("kind") != c.at("kind")) {
      fail("config file is for kind '" + user.at("kind").dump() + "', not '" + std::string(kind) + "'");
    }
    merge_strict(c, user, "");
  }
  for (const auto& s : sets) apply_override(c, s);
  if (seed) c["seed"] = *seed;
  validate_config(c);
  return c;
}

void validate_config(const Json& c) {
  try {
    const std::string kind = text(c, "kind");
    const Json& seed = need(c, "seed");
    if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
      fail("'seed' must be a nonnegative integer");
    }
    if (kind == "mesh-info") {
      check_domain(c);
      integer(c, "level", 0, 10);
    } else if (kind == "approx-error") {
      check_domain(c);
      check_gamma(c);
      check_mu(c);
      const int J = integer(c, "fine_level", 1, 10);
      check_levels(need(c, "levels"), "levels", 0, J - 1);
      if (c.at("levels").size() < 2) fail("'levels' needs at least two entries");
      integer(c, "oversample", 0, 4);
      if (J + c.at("oversample").get<int>() > 11) fail("fine_level + oversample must not exceed 11");
      integer(c, "subsamples_per_segment", 0, 1000);
      const Json& in = need(c, "input");
      integer(in, "segments", 1, 1000000);
      positive(in, "amplitude");
      positive(in, "dt");
    } else if (kind == "integrate-benchmark") {
      const Json& orders = need(c, "orders");
      if (!orders.is_array() || orders.empty()) fail("'orders' must be a nonempty array");
      for (const auto& p : orders) {
        if (!p.is_number_integer() || (p != 1 && p != 2 && p != 4)) fail("'orders' entries must be 1, 2 or 4");
      }
      const Json& steps = need(c, "steps");
      if (!steps.is_array() || steps.size() < 2) fail("'steps' needs at least two entries");
      const double T = positive(c, "horizon");
      for (const auto& h : steps) {
        if (!h.is_number() || !(h.get<double>() > 0.0)) fail("'steps' entries must be positive");
        const double n = T / h.get<double>();
        if (std::abs(n - std::round(n)) > 1e-9 * n) fail("every step must divide horizon");
      }
      integer(c, "startup_substeps", 1, 1024);
    } else if (kind == "simulate-plant") {
      check_domain(c);
      check_gamma(c);
      check_mu(c);
      integer(c, "level", 0, 8);
      check_wing(c);
      check_scheme(c);
      check_vector(c, "x0", 4);
      check_step(c);
      const Json& f = need(c, "forcing");
      number(f, "amplitude");
      nonnegative(f, "frequency");
    } else if (kind == "identify") {
      check_domain(c);
      check_gamma(c);
      check_mu(c);
      check_wing(c);
      positive(c, "g0");
      positive(c, "g1");
      const int lp = integer(c, "plant_level", 0, 8);
      integer(c, "estimator_level", 0, 8);
      const int os = integer(c, "oversample", 0, 10);
      if (os < lp) fail("'oversample' must not be below plant_level");
      const std::string upd = text(c, "update");
      if (upd != "error" && upd != "estimate" && upd != "measured") {
        fail("'update' must be 'error', 'estimate' or 'measured'");
      }
      positive(c, "gain");
      nonnegative(c, "weight_q");
      const Json& in = need(c, "input");
      number(in, "amplitude");
      positive(in, "base_frequency");
      integer(in, "tones", 1, 32);
      check_vector(c, "x0", 4);
      check_vector(c, "x_hat0", 4);
      check_scheme(c);
      check_step(c);
      const double w = number(c, "mismatch_window");
      if (!(w > 0.0 && w <= 0.5)) fail("'mismatch_window' must lie in (0, 0.5]");
      check_levels(need(c, "sweep_levels"), "sweep_levels", 0, 8);
      integer(c, "reference_level", 0, 8);
    } else if (kind == "control-wing") {
      check_domain(c);
      check_gamma(c);
      check_mu(c);
      check_wing(c);
      positive(c, "g0");
      positive(c, "g1");
      positive(c, "q_position");
      positive(c, "q_velocity");
      positive(c, "k");
      positive(c, "epsilon");
      const int lp = integer(c, "plant_level", 0, 8);
      integer(c, "control_level", 0, 8);
      const int os = integer(c, "oversample", 0, 10);
      if (os < lp) fail("'oversample' must not be below plant_level");
      positive(c, "adaptation_gain");
      const Json& r = need(c, "reference");
      number(r, "h_amplitude");
      nonnegative(r, "h_frequency");
      number(r, "theta_amplitude");
      nonnegative(r, "theta_frequency");
      nonnegative(c, "x0_norm");
      check_scheme(c);
      check_step(c);
      const double tail = number(c, "tail_fraction");
      if (!(tail > 0.0 && tail <= 1.0)) fail("'tail_fraction' must lie in (0, 1]");
      positive(c, "chatter_threshold");
      nonnegative(c, "dissipation_slack");
      const double rate = number(c, "dissipation_rate_min");
      if (rate < 0.0 || rate > 1.0) fail("'dissipation_rate_min' must lie in [0, 1]");
    } else {
      fail("unknown experiment kind '" + kind + "'");
    }
  } catch (const Json::exception& e) {
    fail(e.what());
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  Json j = Json::parse(buf.str(), nullptr, false, true);
  if (j.is_discarded()) fail("config '" + path + "' is not valid JSON");
  return j;
}

}  // namespace hystrl::cli
