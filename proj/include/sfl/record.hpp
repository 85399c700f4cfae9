#pragma once

#include <string>

#include <json.hpp>

#include "sfl/experiments.hpp"

namespace sfl {

nlohmann::json to_json(const std::vector<EpsilonStat>& stats);
nlohmann::json to_json(const TailRecord& rec);
nlohmann::json to_json(const EdgeRecord& rec);
nlohmann::json to_json(const DistanceRecord& rec);
nlohmann::json to_json(const DecouplingRecord& rec);
nlohmann::json to_json(const TensorizationRecord& rec);
nlohmann::json to_json(const SubspaceIncompRecord& rec);

// One JSONL line: schema/code version, kind, config hash, canonical config,
// and the payload.  Timing never goes here (lines must be byte-stable).
std::string record_line(const std::string& kind, const ExperimentConfig& cfg,
                        const nlohmann::json& payload);

// "epsilon,hits,trials,estimate,ci_lo,ci_hi" rows, 17 significant digits.
std::string epsilon_csv(const std::vector<EpsilonStat>& stats);

std::string format_g17(double v);

}  // namespace sfl
