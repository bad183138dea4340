#pragma once

#include "caznrls/experiment.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace caznrls {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// JSON experiment configuration. Keys mirror ExperimentConfig; unknown keys
// are rejected. See README for the schema.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::string& path);

nlohmann::json scenario_to_json(const ScenarioSpec& s);
ScenarioSpec scenario_from_json(const nlohmann::json& j);

// Canonical form of everything that affects the numbers written to the CSVs.
// Worker count and output paths are left out.
nlohmann::json to_json(const ExperimentConfig& cfg);

// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace caznrls
