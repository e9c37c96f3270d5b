#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace hystrl::cli {

using Json = nlohmann::json;

struct KindInfo {
  std::string_view name;
  std::string_view description;
};

/// Every experiment kind in dispatch order.
[[nodiscard]] const std::vector<KindInfo>& experiment_kinds();
[[nodiscard]] bool is_kind(std::string_view kind);

/// Complete default configuration for a kind; Errc::config_invalid for an unknown kind.
[[nodiscard]] Json default_config(std::string_view kind);

/// "a.b.c=value". The value is read as JSON when it parses, else as a string.
void apply_override(Json& config, std::string_view assignment);

/// Defaults, then the user file, then --set overrides, then --seed. Keys not
/// present in the defaults are rejected. The result is validated.
[[nodiscard]] Json resolve_config(std::string_view kind, const Json& user, const std::vector<std::string>& sets,
                                  std::optional<std::uint64_t> seed);

/// Errc::config_invalid on wrong types or out-of-range values.
void validate_config(const Json& config);

[[nodiscard]] Json load_json_file(const std::string& path);

}  // namespace hystrl::cli
