#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <hystrl/error.hpp>
#include <hystrl/rate_experiment.hpp>
#include <hystrl_cli/cli.hpp>
#include <hystrl_cli/config.hpp>
#include <hystrl_cli/experiments.hpp>

using namespace hystrl;
using namespace hystrl::cli;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("hystrl_cli_" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& leaf) const { return (dir / leaf).string(); }
};

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config(const std::string& name) { return std::string(HYSTRL_CONFIG_DIR) + "/" + name + ".json"; }

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::invalid_argument;
}

}  // namespace

TEST_CASE("config resolution") {
  for (const auto& k : experiment_kinds()) {
    CHECK(is_kind(k.name));
    const Json c = default_config(k.name);
    CHECK(c.at("kind") == k.name);
    CHECK_NOTHROW(validate_config(c));
  }
  CHECK_FALSE(is_kind("plot"));
  CHECK(code_of([] { (void)default_config("plot"); }) == Errc::config_invalid);

  const Json c = resolve_config("mesh-info", Json::object(), {"level=5"}, 9);
  CHECK(c.at("level") == 5);
  CHECK(c.at("seed") == 9);
  CHECK(code_of([] { (void)resolve_config("mesh-info", Json::object(), {"levle=5"}, {}); }) == Errc::config_invalid);
  CHECK(code_of([] { (void)resolve_config("mesh-info", Json{{"kind", "identify"}}, {}, {}); }) == Errc::config_invalid);
  CHECK(code_of([] { (void)resolve_config("mesh-info", Json::object(), {"level=11"}, {}); }) == Errc::config_invalid);
  CHECK(code_of([] { (void)resolve_config("mesh-info", Json::object(), {"level"}, {}); }) == Errc::config_invalid);

  Json d = default_config("control-wing");
  apply_override(d, "wing.mode=simplified");
  CHECK(d.at("wing").at("mode") == "simplified");
  apply_override(d, "epsilon=0.25");
  CHECK(d.at("epsilon") == 0.25);
  CHECK(code_of([&] { apply_override(d, "wing.span=1"); }) == Errc::config_invalid);
}

TEST_CASE("mesh-info prints the cell table") {
  Scratch s("mesh");
  const auto r = invoke({"mesh-info", "--set", "level=3", "--out", s / "run"});
  CHECK(r.code == kOk);
  CHECK(r.out.find("64 cells") != std::string::npos);
  CHECK(r.out.find("(OK)") != std::string::npos);
  const Json summary = Json::parse(slurp(s / "run/summary.json"));
  CHECK(summary.at("metrics").at("cells") == 64);
  CHECK(summary.at("checks").at("area_sum") == true);
  CHECK(summary.at("tool_version") == kToolVersion);
  CHECK(summary.contains("wall_clock_s"));
  const Json written = Json::parse(slurp(s / "run/config.json"));
  CHECK(written.at("level") == 3);
  std::istringstream csv(slurp(s / "run/mesh.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(csv, line)) ++rows;
  CHECK(rows == 64);
}

TEST_CASE("approx-error reproduces the library rate table") {
  Scratch s("approx");
  const auto r = invoke({"approx-error", "--seed", "3", "--out", s / "run", "-q"});
  REQUIRE(r.code == kOk);
  RateOptions opt;
  opt.fine_level = 7;
  opt.levels = {2, 3, 4, 5};
  opt.oversample = 2;
  opt.subsamples_per_segment = 4;
  const auto res = rate_experiment(RidgeFunction::saturation(), oscillatory_input(100, 1.8, 3, 0.1),
                                   [](double s1, double s2) { return 1.0 + 0.5 * std::sin(2.0 * s1) * std::cos(s2); },
                                   TriDomain(-1.0, 1.0), opt);
  std::ostringstream expect;
  write_csv(expect, res);
  CHECK(slurp(s / "run/rates.csv") == expect.str());
  const Json summary = Json::parse(slurp(s / "run/summary.json"));
  CHECK(summary.at("metrics").at("slope").get<double>() == doctest::Approx(res.slope));
}

TEST_CASE("exit codes") {
  Scratch s("exit");
  CHECK(invoke({"mesh-info", "--out", s / "a", "-q"}).code == kOk);
  CHECK(invoke({"mesh-info", "--out", s / "b", "--set", "nope=1"}).code == kConfigError);
  CHECK(invoke({"mesh-info", "--out", s / "c", "--config", s / "missing.json"}).code == kConfigError);
  CHECK(invoke({"frobnicate"}).code == kConfigError);
  const auto diverged = invoke({"simulate-plant", "--out", s / "d", "-q", "--set", "step=0.5", "--set", "horizon=500",
                             "--set", "wing.k_theta=200"});
  CHECK(diverged.code == kRunDiverged);
  const auto failed = invoke({"control-wing", "--out", s / "e", "-q", "--set", "k=0.001", "--set", "horizon=1"});
  CHECK(failed.code == kCheckFailed);
  CHECK(failed.err.find("k_exceeds_d_bound") != std::string::npos);
  CHECK(exit_code_for(Errc::nan_detected) == kRunDiverged);
  CHECK(exit_code_for(Errc::config_invalid) == kConfigError);
}

TEST_CASE("same config and seed give byte-identical CSV") {
  Scratch s("repro");
  for (const std::string kind : {"approx-error", "simulate-plant", "identify"}) {
    std::vector<std::string> extra;
    if (kind == "identify") extra = {"--set", "horizon=4", "--set", "sweep_levels=[1,2]", "--set", "reference_level=3"};
    auto args_a = std::vector<std::string>{kind, "--seed", "5", "-q", "--out", s / (kind + "_a")};
    auto args_b = std::vector<std::string>{kind, "--seed", "5", "-q", "--out", s / (kind + "_b")};
    args_a.insert(args_a.end(), extra.begin(), extra.end());
    args_b.insert(args_b.end(), extra.begin(), extra.end());
    REQUIRE(invoke(args_a).code == kOk);
    REQUIRE(invoke(args_b).code == kOk);
    for (const auto& entry : fs::directory_iterator(s.dir / (kind + "_a"))) {
      if (entry.path().extension() != ".csv") continue;
      CHECK(slurp(entry.path().string()) == slurp((s.dir / (kind + "_b") / entry.path().filename()).string()));
    }
  }
}

TEST_CASE("compare") {
  Scratch s("compare");
  REQUIRE(invoke({"control-wing", "-c", config("control-wing-chatter"), "-q", "--out", s / "chatter"}).code == kOk);
  REQUIRE(invoke({"control-wing", "-c", config("control-wing-chatter"), "-q", "--out", s / "again"}).code == kOk);
  REQUIRE(invoke({"control-wing", "-c", config("control-wing-smooth"), "-q", "--out", s / "smooth"}).code == kOk);
  REQUIRE(invoke({"control-wing", "-c", config("control-wing-wide-layer"), "-q", "--out", s / "wide"}).code == kOk);
  const auto load = [&](const std::string& run) { return Json::parse(slurp(s / (run + "/summary.json"))); };

  for (const auto& row : compare_summaries(load("chatter"), load("again"))) {
    CHECK(row.delta == 0.0);
    CHECK(row.equal);
  }
  // halving t_h at eps = 0.01 removes the chattering
  const Json a = load("chatter");
  const Json b = load("smooth");
  CHECK(a.at("metrics").at("chattering") == true);
  CHECK(b.at("metrics").at("chattering") == false);
  bool saw_flag = false;
  for (const auto& row : compare_summaries(a, b)) {
    if (row.name == "chattering") {
      saw_flag = true;
      CHECK_FALSE(row.equal);
    }
  }
  CHECK(saw_flag);
  // a wider boundary layer: no chattering, larger tail bound than the smooth run
  const Json w = load("wide");
  CHECK(w.at("metrics").at("chattering") == false);
  CHECK(w.at("metrics").at("tail_sup").get<double>() > b.at("metrics").at("tail_sup").get<double>());

  const auto text = invoke({"compare", s / "chatter/summary.json", s / "smooth/summary.json"});
  CHECK(text.code == kOk);
  CHECK(text.out.find("chattering") != std::string::npos);

  REQUIRE(invoke({"mesh-info", "-q", "--out", s / "mesh"}).code == kOk);
  CHECK(code_of([&] { (void)compare_summaries(load("chatter"), load("mesh")); }) == Errc::config_invalid);
  CHECK(invoke({"compare", s / "chatter/summary.json", s / "mesh/summary.json"}).code == kConfigError);
}

TEST_CASE("--list, --version and sweeps") {
  const auto list = invoke({"--list"});
  CHECK(list.code == kOk);
  for (const auto& k : experiment_kinds()) CHECK(list.out.find(std::string(k.name)) != std::string::npos);
  CHECK(invoke({"--version"}).out.find(kToolVersion) != std::string::npos);

  Scratch s("sweep");
  const auto r = invoke({"mesh-info", "-q", "--out", s / "sweep", "--sweep", "level=1,2,4"});
  CHECK(r.code == kOk);
  for (const auto& [lvl, cells] : std::vector<std::pair<std::string, int>>{{"1", 4}, {"2", 16}, {"4", 256}}) {
    const Json summary = Json::parse(slurp(s / ("sweep/level=" + lvl + "/summary.json")));
    CHECK(summary.at("metrics").at("cells") == cells);
  }
}
