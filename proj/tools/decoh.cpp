#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "decoh/io.hpp"

namespace fs = std::filesystem;
using namespace decoh;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

struct Options {
    std::string config_path;
    std::string out_dir = "decoh-out";
    std::vector<std::string> overrides;
    bool verbose = false;
    double p = 1.0;
    double L = 0.5;
    double target = 0.5;
    double mass = 1.0;
};

void error_json(const std::string& kind, const std::string& message, nlohmann::json extra = nlohmann::json::object())
{
    extra["error"] = kind;
    extra["message"] = message;
    std::cerr << extra.dump() << '\n';
}

ExperimentConfig resolve(const Options& opt)
{
    ExperimentConfig config = opt.config_path.empty() ? ExperimentConfig{} : load_config(opt.config_path);
    for (const auto& o : opt.overrides) apply_override(config, o);
    config.validate();
    return config;
}

std::vector<double> complex_pair(Complex z) { return {z.real(), z.imag()}; }

// Each subcommand returns the files it wrote; numerical invalidity is thrown.
std::vector<std::string> run_calibrate(const Options& opt, ExperimentConfig& config, const fs::path& out)
{
    config.p = opt.p;
    config.width = opt.L;
    config.mass = opt.mass;
    const double mv0 = calibrate_beam_splitter(opt.p, opt.L, opt.target, opt.mass);
    config.mv0 = mv0;
    const ScatteringProbabilities rt = analytic_RT(opt.p, SquareWell{mv0 / opt.mass, opt.L}, opt.mass);
    std::printf("mV0 = %.6f\n", mv0);
    std::printf("|R|^2 = %.12f  |T|^2 = %.12f\n", rt.reflection, rt.transmission);
    write_json(out / "calibrate.json", {{"p", opt.p},
                                        {"L", opt.L},
                                        {"target", opt.target},
                                        {"mass", opt.mass},
                                        {"mv0", mv0},
                                        {"reflection", rt.reflection},
                                        {"transmission", rt.transmission}});
    return {"calibrate.json"};
}

void require_valid(const ExperimentRecord& r)
{
    if (!r.valid) {
        throw NumericalError("scattering record at xi0 = " + std::to_string(r.xi0) +
                             " failed its diagnostics (see the record for details)");
    }
}

std::vector<std::string> run_scatter(const Options& opt, const ExperimentConfig& config, const fs::path& out)
{
    const ExperimentRecord r = run_scattering(config);
    write_json(out / "scatter.json", to_json(r));
    if (opt.verbose) std::cerr << to_json(r).dump(2) << '\n';
    std::printf("impurity = %.6g  p_max = %.6f  theta* = %.6f\n", r.impurity, r.p_max, r.theta_star);
    require_valid(r);
    return {"scatter.json"};
}

std::vector<std::string> run_scan_xi0(const ExperimentConfig& config, const fs::path& out)
{
    const std::vector<ExperimentRecord> recs = scan_xi0(config);
    std::vector<std::vector<double>> rows;
    std::vector<double> imp, pm;
    nlohmann::json records = nlohmann::json::array();
    for (const auto& r : recs) {
        rows.push_back({r.xi0, r.impurity, r.p_max, r.theta_star});
        imp.push_back(r.impurity);
        pm.push_back(r.p_max);
        records.push_back(to_json(r));
        std::printf("xi0 = %.4f  impurity = %.6g  p_max = %.6f\n", r.xi0, r.impurity, r.p_max);
    }
    write_csv(out / "scan_xi0.csv", "scan-xi0", {"xi0", "impurity", "p_max", "theta_star"}, rows);
    nlohmann::json summary{{"records", records}};
    try {
        summary["spearman_impurity_p_max"] = spearman(imp, pm);
    } catch (const InvalidArgument&) {
        summary["spearman_impurity_p_max"] = nullptr;
    }
    write_json(out / "scan_xi0.json", summary);
    for (const auto& r : recs) require_valid(r);
    return {"scan_xi0.csv", "scan_xi0.json"};
}

std::vector<std::vector<double>> mc_rows(const std::vector<CompositenessRecord>& recs)
{
    std::vector<std::vector<double>> rows;
    for (const auto& r : recs) rows.push_back({r.Y0, r.xi, r.q_mean, r.q_sq_mean, r.m_c});
    return rows;
}

std::vector<std::string> run_scan_mc(const ExperimentConfig& config, const fs::path& out)
{
    const std::vector<std::string> cols{"Y0", "xi", "q_mean", "q_sq_mean", "m_c"};
    const auto base = scan_compositeness(config);
    const auto wide = scan_compositeness(wide_well_variant(config));
    write_csv(out / "scan_mc.csv", "scan-mc", cols, mc_rows(base));
    write_csv(out / "scan_mc_wide.csv", "scan-mc", cols, mc_rows(wide));
    auto peak = [](const std::vector<CompositenessRecord>& recs) {
        const CompositenessRecord* best = &recs.front();
        for (const auto& r : recs)
            if (r.m_c > best->m_c) best = &r;
        return nlohmann::json{{"Y0", best->Y0}, {"xi", best->xi}, {"m_c", best->m_c}};
    };
    write_json(out / "scan_mc.json", {{"peak", peak(base)}, {"wide_peak", peak(wide)}});
    return {"scan_mc.csv", "scan_mc_wide.csv", "scan_mc.json"};
}

std::vector<std::string> run_influence(const ExperimentConfig& config, const fs::path& out)
{
    const InfluenceStudy study = influence_study(config);
    std::vector<std::vector<double>> rows;
    for (const auto& r : study.rows) {
        std::vector<double> row{r.t};
        for (Complex z : {r.E, r.D, r.A, r.F}) {
            const auto p = complex_pair(z);
            row.insert(row.end(), p.begin(), p.end());
        }
        row.push_back(std::abs(r.overlap));
        row.push_back(std::arg(r.overlap));
        rows.push_back(std::move(row));
    }
    write_csv(out / "influence.csv", "influence",
              {"t", "reE", "imE", "reD", "imD", "reA", "imA", "reF", "imF", "overlap_abs", "overlap_arg"}, rows);
    const InfluenceOverlap& f = study.final_overlap;
    write_json(out / "influence.json", {{"functional", complex_pair(f.functional)},
                                        {"overlap", complex_pair(f.overlap)},
                                        {"magnitude", f.magnitude}});
    std::printf("|<psi_A|psi_B>| = %.12f\n", f.magnitude);
    return {"influence.csv", "influence.json"};
}

std::vector<std::string> run_riccati_check(const ExperimentConfig& config, const fs::path& out)
{
    const Grid1D grid = influence_grid();
    const CrosscheckReport report =
        riccati_crosscheck(default_profiles(), default_states(grid), 2.5e-4, 1e-4, config.n_fock);
    write_json(out / "riccati_check.json", to_json(report));
    for (const auto& e : report.entries) {
        std::printf("%-34s %-18s fidelity %.12f %s\n", e.profile.c_str(), e.state.c_str(), e.fidelity,
                    e.pass ? "ok" : "FAIL");
    }
    if (!report.pass) throw NumericalError("riccati crosscheck: some fidelities are below threshold");
    return {"riccati_check.json"};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Decoherence of a composite particle by its internal degree of freedom"};
    app.require_subcommand(1);
    Options opt;
    const auto common = [&opt](CLI::App* sub) {
        sub->add_option("-c,--config", opt.config_path, "INI config file");
        sub->add_option("-o,--out", opt.out_dir, "output directory")->capture_default_str();
        sub->add_option("-s,--set", opt.overrides, "override section.key=value (repeatable)");
        sub->add_flag("-v,--verbose", opt.verbose, "print full records");
    };
    auto* calibrate = app.add_subcommand("calibrate", "mV0 of a square well with the given reflection");
    common(calibrate);
    calibrate->add_option("--p", opt.p, "incident momentum")->capture_default_str();
    calibrate->add_option("--L", opt.L, "well width")->capture_default_str();
    calibrate->add_option("--target", opt.target, "reflection probability")->capture_default_str();
    calibrate->add_option("--mass", opt.mass, "particle mass")->capture_default_str();
    auto* scatter = app.add_subcommand("scatter", "one two-branch scattering run");
    auto* scan = app.add_subcommand("scan-xi0", "impurity and interference over the internal displacement");
    auto* mc = app.add_subcommand("scan-mc", "compositeness maps over (Y0, xi)");
    auto* influence = app.add_subcommand("influence", "internal-state overlap along two classical paths");
    auto* riccati = app.add_subcommand("riccati-check", "normal-ordered propagator against the grid solver");
    for (auto* sub : {scatter, scan, mc, influence, riccati}) common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    ExperimentConfig config;
    try {
        config = resolve(opt);
    } catch (const Error& e) {
        error_json("config", e.what());
        return kExitConfig;
    }

    const fs::path out = opt.out_dir;
    const std::string name = app.get_subcommands().front()->get_name();
    try {
        fs::create_directories(out);
        std::vector<std::string> outputs;
        if (name == "calibrate")
            outputs = run_calibrate(opt, config, out);
        else if (name == "scatter")
            outputs = run_scatter(opt, config, out);
        else if (name == "scan-xi0")
            outputs = run_scan_xi0(config, out);
        else if (name == "scan-mc")
            outputs = run_scan_mc(config, out);
        else if (name == "influence")
            outputs = run_influence(config, out);
        else
            outputs = run_riccati_check(config, out);
        write_json(out / "manifest.json", manifest(name, config, outputs));
    } catch (const BoundaryLeakage& e) {
        error_json("boundary_leakage", e.what(), {{"time", e.time}, {"leakage", e.leakage}});
        return kExitNumerical;
    } catch (const NumericalError& e) {
        error_json("numerical", e.what());
        return kExitNumerical;
    } catch (const ConfigError& e) {
        error_json("config", e.what());
        return kExitConfig;
    } catch (const InvalidArgument& e) {
        error_json("config", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        error_json("internal", e.what());
        return kExitNumerical;
    }
    return 0;
}
