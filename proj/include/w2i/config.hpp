#pragma once

#include "w2i/json_extract.hpp"
#include "w2i/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>

namespace w2i {

/// Fields missing from `j` keep their defaults. Unknown keys and bad values
/// are collected into one ConfigError naming each field.
RunConfig config_from_json(const Json& j);

RunConfig load_config(const std::filesystem::path& path);

Json to_json(const RunConfig& config);

/// Command-line values that take precedence over the config file.
struct ConfigOverrides {
    std::optional<int> t_max;
    std::optional<double> threshold_tau;
    std::optional<std::uint64_t> seed;
    std::optional<BackendProfile> backend_profile;
};

/// Applies `overrides` and validates the result.
RunConfig resolve_config(RunConfig base, const ConfigOverrides& overrides);

}  // namespace w2i
