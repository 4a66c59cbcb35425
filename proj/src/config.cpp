#include "decoh/config.hpp"

#include <charconv>
#include <functional>
#include <variant>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace decoh {

namespace {

using Target = std::variant<double*, Index*, std::size_t*, unsigned*, bool*, std::string*>;

struct Field {
    std::string key;
    Target target;
};

void add_grid(std::vector<Field>& f, const std::string& section, GridConfig& g)
{
    f.push_back({section + ".com_min", &g.com_min});
    f.push_back({section + ".com_max", &g.com_max});
    f.push_back({section + ".com_points", &g.com_points});
    f.push_back({section + ".int_min", &g.int_min});
    f.push_back({section + ".int_max", &g.int_max});
    f.push_back({section + ".int_points", &g.int_points});
}

std::vector<Field> schema(ExperimentConfig& c)
{
    std::vector<Field> f;
    const auto add = [&f](std::string key, Target t) { f.push_back({std::move(key), t}); };
    add("potential.mv0", &c.mv0);
    add("potential.mass", &c.mass);
    add("potential.width", &c.width);
    add("potential.edge_scale", &c.edge_scale);
    add("internal.k", &c.k);
    add("internal.xi0", &c.xi0);
    add("internal.width_sq", &c.int_width_sq);
    add("com.y0", &c.Y0);
    add("com.width_sq", &c.com_width_sq);
    add("com.p", &c.p);
    add_grid(f, "grid", c.grid);
    add("evolve.dt", &c.dt);
    add("evolve.max_time", &c.max_time);
    add("evolve.stop_radius", &c.stop_radius);
    add("evolve.stop_threshold", &c.stop_threshold);
    add("evolve.check_every", &c.check_every);
    add("evolve.leakage_threshold", &c.leakage_threshold);
    add("scan.xi0_min", &c.xi0_min);
    add("scan.xi0_max", &c.xi0_max);
    add("scan.xi0_points", &c.xi0_points);
    add("scan.threads", &c.threads);
    add_grid(f, "scan_grid", c.scan_grid);
    add("mc.y0_min", &c.mc_Y0_min);
    add("mc.y0_max", &c.mc_Y0_max);
    add("mc.y0_points", &c.mc_Y0_points);
    add("mc.xi_min", &c.mc_xi_min);
    add("mc.xi_max", &c.mc_xi_max);
    add("mc.xi_points", &c.mc_xi_points);
    add("mc.smoothed", &c.mc_smoothed);
    add("mc.wide_width", &c.wide_width);
    add("mc.wide_narrow_width_sq", &c.wide_narrow_width_sq);
    add("mc.wide_narrow_axis", &c.wide_narrow_axis);
    add_grid(f, "mc_grid", c.mc_grid);
    add("influence.edge_scale", &c.influence_edge_scale);
    add("influence.y_start", &c.influence_Y_start);
    add("influence.horizon", &c.influence_horizon);
    add("influence.path_step", &c.influence_path_step);
    add("influence.dt", &c.influence_dt);
    add("influence.row_interval", &c.influence_row_interval);
    add("influence.n_fock", &c.n_fock);
    add("run.seed", &c.seed);
    return f;
}

template <class T>
T parse_number(const std::string& key, const std::string& text)
{
    T out{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("config key '" + key + "': cannot parse '" + text + "' as " +
                          (std::is_floating_point_v<T> ? "a number" : "a non-negative integer"));
    }
    return out;
}

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    const auto e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

void assign(const Field& field, const std::string& raw)
{
    const std::string text = trim(raw);
    std::visit(
        [&](auto* p) {
            using T = std::remove_pointer_t<decltype(p)>;
            if constexpr (std::is_same_v<T, std::string>) {
                *p = text;
            } else if constexpr (std::is_same_v<T, bool>) {
                if (text == "true" || text == "1")
                    *p = true;
                else if (text == "false" || text == "0")
                    *p = false;
                else
                    throw ConfigError("config key '" + field.key + "': expected true or false, got '" + text + "'");
            } else if constexpr (std::is_same_v<T, Index>) {
                const auto v = parse_number<Index>(field.key, text);
                if (v < 0) throw ConfigError("config key '" + field.key + "' must be non-negative");
                *p = v;
            } else {
                *p = parse_number<T>(field.key, text);
            }
        },
        field.target);
}

} // namespace

void set_value(ExperimentConfig& config, const std::string& key, const std::string& value)
{
    for (const Field& f : schema(config)) {
        if (f.key == key) {
            assign(f, value);
            return;
        }
    }
    throw ConfigError("unknown config key '" + key + "'");
}

void apply_override(ExperimentConfig& config, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("override '" + std::string(assignment) + "' is not of the form section.key=value");
    }
    set_value(config, trim(std::string(assignment.substr(0, eq))), std::string(assignment.substr(eq + 1)));
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    if (!std::filesystem::is_regular_file(path)) throw ConfigError("config file not found: " + path.string());
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("cannot parse config " + path.string() + ": " + e.what());
    }
    ExperimentConfig config;
    for (const auto& [section, body] : tree) {
        if (body.empty()) throw ConfigError("config key '" + section + "' lies outside any [section]");
        for (const auto& [key, value] : body) set_value(config, section + "." + key, value.data());
    }
    return config;
}

std::vector<std::string> config_keys()
{
    ExperimentConfig scratch;
    std::vector<std::string> keys;
    for (const Field& f : schema(scratch)) keys.push_back(f.key);
    return keys;
}

nlohmann::json to_json(const ExperimentConfig& config)
{
    ExperimentConfig copy = config;
    nlohmann::json out = nlohmann::json::object();
    for (const Field& f : schema(copy)) {
        const auto dot = f.key.find('.');
        std::visit([&](auto* p) { out[f.key.substr(0, dot)][f.key.substr(dot + 1)] = *p; }, f.target);
    }
    return out;
}

} // namespace decoh
