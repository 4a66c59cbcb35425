#include "decoh/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace decoh {

ExternalPotential ExperimentConfig::potential() const
{
    if (edge_scale == 0.0) return SquareWell{depth(), width};
    return SmoothedWell{depth(), width, edge_scale};
}

void ExperimentConfig::validate() const
{
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(what);
    };
    require(mass > 0.0, "potential.mass must be positive");
    require(mv0 >= 0.0, "potential.mv0 must be non-negative");
    require(width > 0.0, "potential.width must be positive");
    require(edge_scale >= 0.0, "potential.edge_scale must be non-negative");
    require(k > 0.0, "internal.k must be positive");
    require(com_width_sq > 0.0 && int_width_sq > 0.0, "packet widths must be positive");
    require(dt > 0.0 && max_time > 0.0, "evolve.dt and evolve.max_time must be positive");
    require(check_every > 0, "evolve.check_every must be positive");
    require(xi0_points >= 1 && xi0_max >= xi0_min, "scan xi0 range is empty");
    require(mc_Y0_points >= 1 && mc_xi_points >= 1, "mc ranges are empty");
    require(wide_narrow_axis == "com" || wide_narrow_axis == "internal", "mc.wide_narrow_axis must be com or internal");
    require(influence_edge_scale > 0.0, "influence.edge_scale must be positive");
    require(n_fock >= 2, "influence.n_fock must be at least 2");
    for (const GridConfig* g : {&grid, &scan_grid, &mc_grid}) {
        require(g->com_max > g->com_min && g->int_max > g->int_min, "grid bounds must be increasing");
        require(is_power_of_two(g->com_points) && g->com_points >= 8 && is_power_of_two(g->int_points) &&
                    g->int_points >= 8,
                "grid point counts must be powers of two, at least 8");
    }
}

ExperimentRecord run_scattering(const ExperimentConfig& config)
{
    config.validate();
    const Grid1D gY = config.grid.com();
    const Grid1D gy = config.grid.internal();
    const ExternalPotential v = config.potential();
    const HarmonicInternal u = config.internal();

    const Wavefunction1D internal = make_gaussian_1d(gy, config.xi0, config.int_width_sq, 0.0);
    const Wavefunction2D left0 = product_state(make_gaussian_1d(gY, -config.Y0, config.com_width_sq, config.p), internal);
    const Wavefunction2D right0 =
        product_state(make_gaussian_1d(gY, config.Y0, config.com_width_sq, -config.p), internal);

    EvolutionPlan plan;
    plan.dt = config.dt;
    plan.n_steps = static_cast<std::size_t>(std::ceil(config.max_time / std::abs(config.dt)));
    plan.record_every = config.check_every;
    plan.stop = StopCondition{config.stop_radius, config.stop_threshold};
    plan.leakage_threshold = config.leakage_threshold;

    const Eigen::ArrayXXd table = composite_potential(v, u, gY, gy);
    const Trajectory2D left = evolve_2d(left0, table, plan);
    const bool mirrored = is_even(v) && gY.x_min() == -gY.x_max();
    Wavefunction2D right = mirrored ? mirror_com(left.final_state) : right0;
    if (!mirrored) {
        EvolutionPlan fixed = plan;
        fixed.stop.reset();
        fixed.n_steps = left.diagnostics.steps_taken;
        right = evolve_2d(right0, table, fixed).final_state;
    }

    const auto branch_sum = [&](double theta) {
        Wavefunction2D s = left.final_state;
        s.amp += right.amp * std::exp(kI * theta);
        return normalized(std::move(s));
    };
    // Clearance is judged per branch: interference can lift the central
    // probability of the superposition above either branch's.
    const bool before_clear =
        central_probability(left.final_state, config.stop_radius) >= config.stop_threshold ||
        central_probability(right, config.stop_radius) >= config.stop_threshold;
    const auto leftward = [&](double theta) { return leftward_probability(branch_sum(theta)).probability; };
    const ThetaFit fit = optimize_theta(leftward);

    ExperimentRecord rec;
    rec.xi0 = config.xi0;
    rec.impurity = impurity(partial_trace_internal(branch_sum(fit.theta_star)));
    rec.p_max = fit.p_max;
    rec.theta_star = fit.theta_star;
    rec.fit_a = fit.a;
    rec.fit_abs_z = std::abs(fit.z);
    rec.stop_time = static_cast<double>(left.diagnostics.steps_taken) * std::abs(config.dt);
    rec.before_clear = before_clear;
    rec.diagnostics = left.diagnostics;
    rec.valid = !before_clear && left.diagnostics.stopped_by_condition &&
                left.diagnostics.max_norm_drift_per_step <= 1e-12 &&
                left.diagnostics.boundary_leakage <= config.leakage_threshold;
    return rec;
}

namespace {

// Runs task(i) for i in [0, n) on up to `threads` workers; rethrows the first failure.
template <class Task>
void parallel_for(Index n, unsigned threads, Task task)
{
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<Index>(workers, n));
    std::atomic<Index> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (Index i = next++; i < n; i = next++) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

double lattice_point(double lo, double hi, Index n, Index i)
{
    return n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

} // namespace

std::vector<ExperimentRecord> scan_xi0(const ExperimentConfig& config)
{
    config.validate();
    std::vector<ExperimentRecord> out(static_cast<std::size_t>(config.xi0_points));
    parallel_for(config.xi0_points, config.threads, [&](Index i) {
        ExperimentConfig c = config;
        c.grid = config.scan_grid;
        c.xi0 = lattice_point(config.xi0_min, config.xi0_max, config.xi0_points, i);
        out[static_cast<std::size_t>(i)] = run_scattering(c);
    });
    return out;
}

std::vector<CompositenessRecord> scan_compositeness(const ExperimentConfig& config)
{
    config.validate();
    const Grid1D gY = config.mc_grid.com();
    const Grid1D gy = config.mc_grid.internal();
    const ExternalPotential v = config.mc_smoothed ? config.potential() : ExternalPotential{SquareWell{config.depth(), config.width}};
    const Index nY0 = config.mc_Y0_points;
    const Index nxi = config.mc_xi_points;
    std::vector<CompositenessRecord> out(static_cast<std::size_t>(nY0 * nxi));
    parallel_for(nxi, config.threads, [&](Index j) {
        const double xi = lattice_point(config.mc_xi_min, config.mc_xi_max, nxi, j);
        const QProfile q = q_profile(v, make_gaussian_1d(gy, xi, config.int_width_sq, 0.0), gY, QMode::exact);
        for (Index i = 0; i < nY0; ++i) {
            const double Y0 = lattice_point(config.mc_Y0_min, config.mc_Y0_max, nY0, i);
            const Compositeness c = compositeness(q, make_gaussian_1d(gY, Y0, config.com_width_sq, 0.0));
            out[static_cast<std::size_t>(i * nxi + j)] = {Y0, xi, c.q_mean, c.q_sq_mean, c.m_c};
        }
    });
    return out;
}

ExperimentConfig wide_well_variant(const ExperimentConfig& config)
{
    ExperimentConfig c = config;
    c.width = config.wide_width;
    if (config.wide_narrow_axis == "com")
        c.com_width_sq = config.wide_narrow_width_sq;
    else
        c.int_width_sq = config.wide_narrow_width_sq;
    return c;
}

std::vector<NamedProfile> default_profiles(double horizon)
{
    const auto make = [horizon](std::function<double(double)> w) { return DrivingProfile{std::move(w), horizon}; };
    return {
        {"constant w=81", DrivingProfile::constant(81.0, horizon), 1.0 - 1e-6},
        {"bump 81+10exp(-(t-1)^2)", make([](double t) { return 81.0 + 10.0 * std::exp(-(t - 1.0) * (t - 1.0)); }),
         0.999},
        {"pulse 81+60exp(-((t-1)/0.2)^2)",
         make([](double t) { return 81.0 + 60.0 * std::exp(-std::pow((t - 1.0) / 0.2, 2)); }), 0.999},
        {"dip 81-50exp(-((t-0.8)/0.15)^2)",
         make([](double t) { return 81.0 - 50.0 * std::exp(-std::pow((t - 0.8) / 0.15, 2)); }), 0.999},
        {"modulated 81+20sin(3t)", make([](double t) { return 81.0 + 20.0 * std::sin(3.0 * t); }), 0.999},
        {"ramp 81+30tanh(2(t-1))", make([](double t) { return 81.0 + 30.0 * std::tanh(2.0 * (t - 1.0)); }), 0.999},
        {"beta=0 (w=1)", DrivingProfile::constant(1.0, horizon), 1.0 - 1e-8},
    };
}

std::vector<NamedState> default_states(const Grid1D& grid)
{
    const Wavefunction1D ground = make_gaussian_1d(grid, 0.0, 1.0 / 9.0, 0.0);
    Wavefunction1D excited = ground;
    for (Index j = 0; j < grid.size(); ++j) excited.amp(j) *= grid.x(j);
    return {{"ground", ground},
            {"displaced xi=0.3", make_gaussian_1d(grid, 0.3, 1.0 / 9.0, 0.0)},
            {"first excited", normalized(std::move(excited))}};
}

CrosscheckReport riccati_crosscheck(const std::vector<NamedProfile>& profiles, const std::vector<NamedState>& states,
                                    double riccati_dt, double grid_dt, Index n_fock)
{
    CrosscheckReport report{{}, true};
    for (const NamedProfile& prof : profiles) {
        const PropagatorCoeffs coeffs = propagator_coefficients(prof.profile, riccati_dt);
        const double T = coeffs.times(coeffs.size() - 1);
        EvolutionPlan plan;
        plan.n_steps = static_cast<std::size_t>(std::llround(std::ceil(T / grid_dt - 1e-9)));
        plan.dt = T / static_cast<double>(plan.n_steps);
        for (const NamedState& st : states) {
            const Wavefunction1D fock = apply_propagator(coeffs, T, st.psi, n_fock);
            const Trajectory1D grid = evolve_1d_parametric(st.psi, prof.profile.w, plan);
            const double fid = std::norm(inner(fock, grid.final_state()));
            const bool ok = fid >= prof.threshold;
            report.entries.push_back({prof.name, st.name, fid, prof.threshold, ok});
            report.pass = report.pass && ok;
        }
    }
    return report;
}

namespace {

std::vector<double> ranks(const std::vector<double>& x)
{
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(x.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t m = i; m <= j; ++m) r[idx[m]] = avg;
        i = j + 1;
    }
    return r;
}

} // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b)
{
    if (a.size() != b.size() || a.size() < 2) throw InvalidArgument("spearman: need two samples of equal size >= 2");
    const std::vector<double> ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) throw InvalidArgument("spearman: a sample is constant");
    return sab / std::sqrt(saa * sbb);
}

InfluenceStudy influence_study(const ExperimentConfig& config)
{
    config.validate();
    const ExternalPotential v = SmoothedWell{config.depth(), config.width, config.influence_edge_scale};
    const HarmonicInternal u = config.internal();
    const double h = config.influence_path_step;
    const PathSample a = classical_path(v, config.influence_Y_start, config.p, config.influence_horizon, h);
    const PathSample b =
        classical_path(v, config.influence_Y_start, config.p, config.influence_horizon, h, -0.5 * config.width);
    const Wavefunction1D psi = make_gaussian_1d(influence_grid(), config.xi0, config.int_width_sq, 0.0);

    const InfluencePropagators props = influence_propagators(a, b, v, u, config.influence_dt);
    const PropagatorCoeffs& ca = props.a;
    const double lattice = 0.5 * ca.dt;
    const auto stride = std::max<Index>(1, static_cast<Index>(std::llround(config.influence_row_interval / lattice)));

    InfluenceStudy study;
    for (Index j = 0; j < ca.size(); j += stride) {
        const double t = ca.times(j);
        const Wavefunction1D pa = apply_propagator(ca, t, psi, config.n_fock);
        const Wavefunction1D pb = apply_propagator(props.b, t, psi, config.n_fock);
        const Complex ov = inner(pa, pb) / (norm(pa) * norm(pb));
        study.rows.push_back({t, ca.E(j), ca.D(j), ca.A(j), ca.F(j), ov});
    }
    InfluenceOptions opt;
    opt.dt = config.influence_dt;
    opt.n_fock = config.n_fock;
    study.final_overlap = influence_overlap(psi, a, b, v, u, opt);
    return study;
}

} // namespace decoh
