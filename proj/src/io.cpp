#include "decoh/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace decoh {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    return out;
}

std::string format_number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// JSON has no infinity or NaN; those become null.
nlohmann::json number(double x)
{
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

} // namespace

void write_csv(const std::filesystem::path& path, const std::string& schema, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows)
{
    std::ofstream out = open_for_write(path);
    out << "# decoh " << schema << " v" << kCsvSchemaVersion << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != columns.size()) throw InvalidArgument("write_csv: row width does not match the header");
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
        out << '\n';
    }
    if (!out) throw Error("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value)
{
    std::ofstream out = open_for_write(path);
    out << value.dump(2) << '\n';
    if (!out) throw Error("failed writing " + path.string());
}

nlohmann::json to_json(const EvolutionDiagnostics& d)
{
    return {{"max_norm_drift_per_step", number(d.max_norm_drift_per_step)},
            {"norm_drift", number(d.norm_drift)},
            {"energy_initial", number(d.energy_initial)},
            {"energy_final", number(d.energy_final)},
            {"energy_drift", number(d.energy_drift)},
            {"boundary_leakage", number(d.boundary_leakage)},
            {"steps_taken", d.steps_taken},
            {"stopped_by_condition", d.stopped_by_condition},
            {"warnings", d.warnings}};
}

nlohmann::json to_json(const ExperimentRecord& r)
{
    return {{"xi0", r.xi0},
            {"impurity", number(r.impurity)},
            {"p_max", number(r.p_max)},
            {"theta_star", number(r.theta_star)},
            {"fit_a", number(r.fit_a)},
            {"fit_abs_z", number(r.fit_abs_z)},
            {"stop_time", r.stop_time},
            {"before_clear", r.before_clear},
            {"valid", r.valid},
            {"diagnostics", to_json(r.diagnostics)}};
}

nlohmann::json to_json(const CrosscheckReport& report)
{
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : report.entries) {
        entries.push_back({{"profile", e.profile},
                           {"state", e.state},
                           {"fidelity", number(e.fidelity)},
                           {"threshold", e.threshold},
                           {"pass", e.pass}});
    }
    return {{"pass", report.pass}, {"entries", entries}};
}

nlohmann::json manifest(const std::string& subcommand, const ExperimentConfig& config,
                        const std::vector<std::string>& outputs)
{
    return {{"tool", "decoh"},
            {"version", kVersion},
            {"subcommand", subcommand},
            {"config", to_json(config)},
            {"outputs", outputs}};
}

} // namespace decoh
