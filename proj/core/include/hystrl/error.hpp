#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hystrl {

enum class Errc {
  invalid_argument,
  time_out_of_range,
  level_too_deep,
  level_mismatch,
  non_monotone_time,
  dimension_mismatch,
  nan_detected,
  startup_underflow,
  not_hurwitz,
  singular_system,
  config_invalid,
  run_diverged,
};

std::string_view to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::time_out_of_range: return "TimeOutOfRange";
    case Errc::level_too_deep: return "LevelTooDeep";
    case Errc::level_mismatch: return "LevelMismatch";
    case Errc::non_monotone_time: return "NonMonotoneTime";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::nan_detected: return "NaNDetected";
    case Errc::startup_underflow: return "StartupUnderflow";
    case Errc::not_hurwitz: return "NotHurwitz";
    case Errc::singular_system: return "SingularSystem";
    case Errc::config_invalid: return "ConfigInvalid";
    case Errc::run_diverged: return "RunDiverged";
  }
  return "Unknown";
}

}  // namespace hystrl
