#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "decoh/experiments.hpp"

namespace decoh {

/// Reads an INI file ([section] key = value). Unknown sections or keys and
/// values that do not parse as the key's type raise ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Applies one "section.key=value" override.
void apply_override(ExperimentConfig& config, std::string_view assignment);

/// Sets a dotted key from its text form.
void set_value(ExperimentConfig& config, const std::string& key, const std::string& value);

/// Every dotted key of the schema, in schema order.
std::vector<std::string> config_keys();

/// Fully resolved configuration as nested {section: {key: value}}.
nlohmann::json to_json(const ExperimentConfig& config);

} // namespace decoh
