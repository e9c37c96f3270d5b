#include "hystrl_cli/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "hystrl_cli/config.hpp"
#include "hystrl_cli/experiments.hpp"

namespace hystrl::cli {

int exit_code_for(Errc code) noexcept {
  switch (code) {
    case Errc::run_diverged:
    case Errc::nan_detected:
      return kRunDiverged;
    default:
      return kConfigError;
  }
}

namespace {

struct RunRequest {
  std::string kind;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  std::string sweep;
  bool quiet = false;
};

int run_one(const RunRequest& req, const std::vector<std::string>& sets, const std::filesystem::path& out_dir,
            std::ostream& out, std::ostream& err, std::mutex& io) {
  try {
    const Json user = req.config_path.empty() ? Json() : load_json_file(req.config_path);
    const Json config = resolve_config(req.kind, user, sets, req.seed);
    const auto t0 = std::chrono::steady_clock::now();
    const RunResult result = run_experiment(config);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_run(result, config, out_dir, wall);
    std::lock_guard lock(io);
    if (!req.quiet) out << "[" << req.kind << "] " << out_dir.string() << '\n' << result.report;
    if (!result.checks_passed()) {
      for (const auto& [name, ok] : result.checks.items()) {
        if (!ok.get<bool>()) err << "check failed: " << name << '\n';
      }
      return kCheckFailed;
    }
    return kOk;
  } catch (const Error& e) {
    std::lock_guard lock(io);
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const Json::exception& e) {
    std::lock_guard lock(io);
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::lock_guard lock(io);
    err << "error: " << e.what() << '\n';
    return kRunDiverged;
  }
}

std::vector<std::string> split_values(const std::string& list) {
  std::vector<std::string> values;
  std::string cur;
  int depth = 0;
  for (char ch : list) {
    if (ch == '[' || ch == '{') ++depth;
    if (ch == ']' || ch == '}') --depth;
    if (ch == ',' && depth == 0) {
      values.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  values.push_back(cur);
  return values;
}

int run_request(const RunRequest& req, std::ostream& out, std::ostream& err) {
  std::mutex io;
  const std::filesystem::path base = req.out_dir.empty() ? std::filesystem::path("out") / req.kind : std::filesystem::path(req.out_dir);
  if (req.sweep.empty()) return run_one(req, req.sets, base, out, err, io);

  const auto eq = req.sweep.find('=');
  if (eq == std::string::npos || eq == 0) {
    err << "error: --sweep expects key=v1,v2,...\n";
    return kConfigError;
  }
  const std::string key = req.sweep.substr(0, eq);
  const auto values = split_values(req.sweep.substr(eq + 1));
  std::vector<int> codes(values.size(), kOk);
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(values.size(), std::thread::hardware_concurrency()));
  std::size_t next = 0;
  std::mutex queue;
  auto work = [&] {
    while (true) {
      std::size_t i = 0;
      {
        std::lock_guard lock(queue);
        if (next >= values.size()) return;
        i = next++;
      }
      auto sets = req.sets;
      sets.push_back(key + "=" + values[i]);
      codes[i] = run_one(req, sets, base / (key + "=" + values[i]), out, err, io);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  return *std::max_element(codes.begin(), codes.end());
}

int run_compare(const std::string& a, const std::string& b, std::ostream& out, std::ostream& err) {
  try {
    const auto rows = compare_summaries(load_json_file(a), load_json_file(b));
    out << format_comparison(rows);
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hysteresis operator approximation, identification and control experiments", "hystrl"};
  app.require_subcommand(0, 1);
  bool list = false;
  bool version = false;
  app.add_flag("--list", list, "list experiment kinds");
  app.add_flag("--version", version, "print the tool version");

  std::vector<RunRequest> requests(experiment_kinds().size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < experiment_kinds().size(); ++i) {
    const auto& k = experiment_kinds()[i];
    auto& r = requests[i];
    r.kind = std::string(k.name);
    auto* sub = app.add_subcommand(r.kind, std::string(k.description));
    sub->add_option("--config,-c", r.config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out,-o", r.out_dir, "output directory (default out/<kind>)");
    sub->add_option("--seed", r.seed, "seed for randomized inputs");
    sub->add_option("--set", r.sets, "override a config field, key.path=value")->allow_extra_args(false);
    sub->add_option("--sweep", r.sweep, "run once per value, key=v1,v2,... in parallel");
    sub->add_flag("--quiet,-q", r.quiet, "no report on stdout");
    subs.push_back(sub);
  }
  std::string cmp_a;
  std::string cmp_b;
  auto* cmp = app.add_subcommand("compare", "metric deltas between two summary.json files");
  cmp->add_option("a", cmp_a, "first summary")->required()->check(CLI::ExistingFile);
  cmp->add_option("b", cmp_b, "second summary")->required()->check(CLI::ExistingFile);

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  if (version) {
    out << "hystrl " << kToolVersion << '\n';
    return kOk;
  }
  if (list) {
    for (const auto& k : experiment_kinds()) out << k.name << "\t" << k.description << '\n';
    return kOk;
  }
  if (cmp->parsed()) return run_compare(cmp_a, cmp_b, out, err);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) return run_request(requests[i], out, err);
  }
  out << app.help();
  return kConfigError;
}

}  // namespace hystrl::cli
