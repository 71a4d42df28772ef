#pragma once

#include "w2i/json_extract.hpp"
#include "w2i/types.hpp"

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

namespace w2i {

/// "<YYYYMMDDTHHMMSSZ>-<8 hex>", the hex being a digest of the prompt and the
/// serialized config (which carries the seed).
std::string make_run_id(const std::string& prompt, const RunConfig& config,
                        std::chrono::system_clock::time_point now);

/// Creates <root>/<run_id>, appending "-2", "-3", ... if the name is taken.
/// Safe against concurrent callers. Returns the id actually used.
std::string reserve_run_dir(const std::filesystem::path& root, const std::string& run_id);

/// result.json body.
Json result_json(const RunResult& result);

/// Writes config.json, iterations/<t>/... and result.json into `dir`.
void write_run(const RunResult& result, const std::filesystem::path& dir);

/// Layout problems in a run directory; empty when it satisfies the contract.
std::vector<std::string> check_run_dir(const std::filesystem::path& dir);

}  // namespace w2i
