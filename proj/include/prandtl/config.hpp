#pragma once

// JSON documents mirroring RunConfig and ToyConfig. Missing keys keep their
// defaults; unknown keys are rejected.

#include <filesystem>

#include <json.hpp>

#include "prandtl/solver.hpp"
#include "prandtl/toy.hpp"

namespace prandtl {

nlohmann::json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ToyConfig& cfg);
ToyConfig toy_config_from_json(const nlohmann::json& j);

/// Reads a JSON file; IoError names the path on failure.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace prandtl
