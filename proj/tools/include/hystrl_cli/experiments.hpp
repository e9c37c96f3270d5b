#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hystrl_cli/config.hpp"

namespace hystrl::cli {

inline constexpr const char* kToolVersion = "0.3.0";

struct Artifact {
  std::string name;     ///< file name inside the output directory
  std::string content;
};

struct RunResult {
  std::string kind;
  Json metrics = Json::object();
  /// Fatal invariant checks, name -> passed. Any false maps to exit code 4.
  Json checks = Json::object();
  std::vector<Artifact> artifacts;
  std::string report;   ///< short human-readable text for stdout

  [[nodiscard]] bool checks_passed() const;
};

/// Runs a validated config. Deterministic for a fixed config.
[[nodiscard]] RunResult run_experiment(const Json& config);

/// Writes config.json, every artifact and summary.json into `out`.
void write_run(const RunResult& result, const Json& config, const std::filesystem::path& out, double wall_clock_s);

[[nodiscard]] Json make_summary(const RunResult& result, double wall_clock_s);

/// Metric diff of two summaries of the same kind; Errc::config_invalid otherwise.
struct MetricDelta {
  std::string name;
  Json a;
  Json b;
  double delta = 0.0;   ///< b - a for numbers and booleans, 0 when equal otherwise
  bool equal = true;
};

[[nodiscard]] std::vector<MetricDelta> compare_summaries(const Json& a, const Json& b);
[[nodiscard]] std::string format_comparison(const std::vector<MetricDelta>& rows);

}  // namespace hystrl::cli
