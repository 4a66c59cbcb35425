#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "decoh/config.hpp"

namespace decoh {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kCsvSchemaVersion = 1;

/// Writes "# decoh <schema> v<version>", the column header, then one row per
/// entry formatted with %.17g so reruns are byte-identical.
void write_csv(const std::filesystem::path& path, const std::string& schema, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

void write_json(const std::filesystem::path& path, const nlohmann::json& value);

nlohmann::json to_json(const EvolutionDiagnostics& diagnostics);
nlohmann::json to_json(const ExperimentRecord& record);
nlohmann::json to_json(const CrosscheckReport& report);

/// Resolved config, tool version and the files a run produced.
nlohmann::json manifest(const std::string& subcommand, const ExperimentConfig& config,
                        const std::vector<std::string>& outputs);

} // namespace decoh
