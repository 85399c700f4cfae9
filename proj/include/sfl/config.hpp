#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "sfl/experiments.hpp"

namespace sfl {

// Parses and validates the JSON experiment config; error messages name the
// offending field by path.
ExperimentConfig parse_config(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);

// Round-trips the parsed config into a fully explicit, sorted-key JSON
// object: whitespace or field order in the input file never changes the hash.
nlohmann::json canonical_config_json(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hash_hex(const std::string& bytes);
std::string config_hash(const ExperimentConfig& cfg);

// Hash with the master seed blanked out: records that differ only by seed
// pool together in reports.
std::string config_pool_hash(const ExperimentConfig& cfg);

}  // namespace sfl
