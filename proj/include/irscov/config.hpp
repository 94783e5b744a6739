#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "irscov/scenario.hpp"
#include "irscov/spatialcorr.hpp"

namespace irscov {

inline constexpr int kConfigSchemaVersion = 1;

// Scenario plus the correlation options that travel with it in a config file.
struct ExperimentConfig {
  Scenario scenario;
  CorrelationOptions correlation;
};

// Throws ConfigError carrying the offending key path.
ExperimentConfig parse_config(const nlohmann::json& document);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const ExperimentConfig& config);

const char* sign_convention_name(PathLossSign sign);
const char* normalization_name(DiagonalNormalization normalization);

}  // namespace irscov
