#include "decoh/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace decoh {

BoundaryLeakage::BoundaryLeakage(double t, double leak)
    : NumericalError([&] {
          std::ostringstream os;
          os << "boundary leakage " << leak << " at t = " << t
             << " exceeds threshold; enlarge the lattice (wrap-around hazard)";
          return os.str();
      }()),
      time(t), leakage(leak)
{
}

namespace {

Index band_points(Index n, double fraction)
{
    return std::max<Index>(4, static_cast<Index>(std::lround(fraction * static_cast<double>(n))));
}

void check_plan(const EvolutionPlan& plan)
{
    if (!(plan.dt != 0.0) || !std::isfinite(plan.dt))
        throw InvalidArgument("EvolutionPlan: dt must be finite and nonzero");
    if (plan.n_steps == 0)
        throw InvalidArgument("EvolutionPlan: n_steps must be positive");
}

void check_normalized(double n2)
{
    if (std::abs(n2 - 1.0) > 1e-10)
        throw InvalidArgument("evolve: initial state must be normalized");
}

// Largest |p| carrying spectral weight above 1e-12 of the peak, per axis.
double significant_momentum(const Eigen::ArrayXd& spectrum, const Eigen::ArrayXd& p)
{
    const double cut = 1e-12 * spectrum.maxCoeff();
    double pmax = 0.0;
    for (Index k = 0; k < p.size(); ++k)
        if (spectrum(k) > cut)
            pmax = std::max(pmax, std::abs(p(k)));
    return pmax;
}

void warn_step_size(EvolutionDiagnostics& diag, double dt, double vmax, double pmax)
{
    if (std::abs(dt) * vmax > 0.1) {
        std::ostringstream os;
        os << "dt*max|V| = " << std::abs(dt) * vmax << " exceeds 0.1 on the state's support";
        diag.warnings.push_back(os.str());
    }
    if (std::abs(dt) * pmax * pmax / 2.0 > kPi) {
        std::ostringstream os;
        os << "kinetic phase per step " << std::abs(dt) * pmax * pmax / 2.0
           << " leaves the principal branch for the state's momentum content";
        diag.warnings.push_back(os.str());
    }
}

double kinetic_2d(const Eigen::ArrayXXcd& amp, const Grid1D& gY, const Grid1D& gy)
{
    Eigen::ArrayXXcd work = amp;
    FftPlan(work.data(), static_cast<int>(gy.size()), static_cast<int>(gY.size()), FftPlan::Direction::forward)
        .execute(work.data());
    const Eigen::ArrayXd pY = gY.momenta_fft_order();
    const Eigen::ArrayXd py = gy.momenta_fft_order();
    const Eigen::ArrayXXd k2 = 0.5 * (pY.square().replicate(1, gy.size()) +
                                      py.square().transpose().replicate(gY.size(), 1));
    return (k2 * work.abs2()).sum() / work.abs2().sum();
}

} // namespace

SplitStepper2D::SplitStepper2D(const Grid1D& grid_Y, const Grid1D& grid_y, const Eigen::ArrayXXd& potential,
                               double dt)
    : dt_(dt),
      work_(grid_Y.size(), grid_y.size()),
      half_potential_((Complex(0.0, -0.5 * dt) * potential.cast<Complex>()).exp()),
      full_potential_(half_potential_.square()),
      kinetic_(grid_Y.size(), grid_y.size()),
      forward_(work_.data(), static_cast<int>(grid_y.size()), static_cast<int>(grid_Y.size()),
               FftPlan::Direction::forward),
      backward_(work_.data(), static_cast<int>(grid_y.size()), static_cast<int>(grid_Y.size()),
                FftPlan::Direction::backward)
{
    if (potential.rows() != grid_Y.size() || potential.cols() != grid_y.size())
        throw InvalidArgument("SplitStepper2D: potential table shape does not match the lattice");
    const Eigen::ArrayXd pY = grid_Y.momenta_fft_order();
    const Eigen::ArrayXd py = grid_y.momenta_fft_order();
    const double inv_n = 1.0 / static_cast<double>(grid_Y.size() * grid_y.size());
    for (Index j = 0; j < grid_y.size(); ++j)
        for (Index i = 0; i < grid_Y.size(); ++i)
            kinetic_(i, j) = inv_n * std::polar(1.0, -0.5 * dt * (pY(i) * pY(i) + py(j) * py(j)));
}

void SplitStepper2D::advance(Eigen::ArrayXXcd& amp, std::size_t steps)
{
    if (steps == 0)
        return;
    work_ = amp;
    work_ *= half_potential_;
    for (std::size_t s = 0; s < steps; ++s) {
        forward_.execute(work_.data());
        work_ *= kinetic_;
        backward_.execute(work_.data());
        if (s + 1 < steps)
            work_ *= full_potential_;
        else
            work_ *= half_potential_;
    }
    amp = work_;
}

double central_probability(const Wavefunction2D& psi, double radius)
{
    const Eigen::ArrayXd rows = psi.amp.abs2().rowwise().sum();
    double inside = 0.0;
    for (Index i = 0; i < psi.grid_Y.size(); ++i)
        if (std::abs(psi.grid_Y.x(i)) < radius)
            inside += rows(i);
    return inside / rows.sum();
}

double energy(const Wavefunction2D& psi, const Eigen::ArrayXXd& potential)
{
    const double n2 = psi.amp.abs2().sum();
    return kinetic_2d(psi.amp, psi.grid_Y, psi.grid_y) + (potential * psi.amp.abs2()).sum() / n2;
}

double energy(const Wavefunction2D& psi, const ExternalPotential& v, const HarmonicInternal& u)
{
    return energy(psi, composite_potential(v, u, psi.grid_Y, psi.grid_y));
}

double kinetic_energy(const Wavefunction1D& psi)
{
    const Index n = psi.grid.size();
    Eigen::ArrayXcd work = psi.amp;
    FftPlan(work.data(), static_cast<int>(n), 1, 1, static_cast<int>(n), FftPlan::Direction::forward)
        .execute(work.data());
    const Eigen::ArrayXd p = psi.grid.momenta_fft_order();
    return (0.5 * p.square() * work.abs2()).sum() / work.abs2().sum();
}

double energy(const Wavefunction1D& psi, const Eigen::ArrayXd& potential)
{
    if (potential.size() != psi.grid.size())
        throw InvalidArgument("energy: potential table does not match the grid");
    return kinetic_energy(psi) + (potential * psi.amp.abs2()).sum() / psi.amp.abs2().sum();
}

Trajectory2D evolve_2d(const Wavefunction2D& psi0, const ExternalPotential& v, const HarmonicInternal& u,
                       const EvolutionPlan& plan)
{
    validate(v);
    validate(u);
    return evolve_2d(psi0, composite_potential(v, u, psi0.grid_Y, psi0.grid_y), plan);
}

Trajectory2D evolve_2d(const Wavefunction2D& psi0, const Eigen::ArrayXXd& potential, const EvolutionPlan& plan)
{
    check_plan(plan);
    const double n0 = norm_squared(psi0);
    check_normalized(n0);
    if (potential.rows() != psi0.grid_Y.size() || potential.cols() != psi0.grid_y.size())
        throw InvalidArgument("evolve_2d: potential table shape does not match the lattice");

    const Grid1D& gY = psi0.grid_Y;
    const Grid1D& gy = psi0.grid_y;
    const Index band_Y = band_points(gY.size(), plan.edge_fraction);
    const Index band_y = band_points(gy.size(), plan.edge_fraction);

    Trajectory2D traj{{}, psi0, {}};
    EvolutionDiagnostics& diag = traj.diagnostics;
    {
        const Eigen::ArrayXXd dens = psi0.amp.abs2();
        const double cut = 1e-10 * dens.maxCoeff();
        const double vmax = (dens > cut).select(potential.abs(), 0.0).maxCoeff();
        Eigen::ArrayXXcd spec = psi0.amp;
        FftPlan(spec.data(), static_cast<int>(gy.size()), static_cast<int>(gY.size()), FftPlan::Direction::forward)
            .execute(spec.data());
        const Eigen::ArrayXXd s2 = spec.abs2();
        const double pY = significant_momentum(s2.rowwise().sum(), gY.momenta_fft_order());
        const double py = significant_momentum(s2.colwise().sum().transpose(), gy.momenta_fft_order());
        warn_step_size(diag, plan.dt, vmax, std::hypot(pY, py));
    }
    diag.energy_initial = energy(psi0, potential);

    const auto record = [&](double t, const Eigen::ArrayXXcd& amp) {
        const double dYdy = gY.dx() * gy.dx();
        Snapshot2D snap{t, std::sqrt(amp.abs2().sum() * dYdy),
                        amp.abs2().rowwise().sum() * gy.dx(), amp.abs2().colwise().sum().transpose() * gY.dx(),
                        std::nullopt};
        if (plan.capture_fields)
            snap.field = Wavefunction2D(gY, gy, amp);
        traj.snapshots.push_back(std::move(snap));
    };

    SplitStepper2D stepper(gY, gy, potential, plan.dt);
    Eigen::ArrayXXcd amp = psi0.amp;
    record(0.0, amp);

    const std::size_t stride = plan.record_every == 0 ? plan.n_steps : plan.record_every;
    std::size_t done = 0;
    double last_norm = std::sqrt(n0);
    // The stop condition arms once the packet has reached the central region.
    bool armed = plan.stop && central_probability(psi0, plan.stop->radius) >= plan.stop->threshold;
    while (done < plan.n_steps) {
        const std::size_t chunk = std::min(stride, plan.n_steps - done);
        stepper.advance(amp, chunk);
        done += chunk;
        const double t = static_cast<double>(done) * plan.dt;
        const Wavefunction2D now(gY, gy, amp);
        const double nrm = norm(now);
        diag.max_norm_drift_per_step =
            std::max(diag.max_norm_drift_per_step, std::abs(nrm - last_norm) / static_cast<double>(chunk));
        last_norm = nrm;
        if (plan.check_leakage) {
            const double leak = edge_probability(now, band_Y, band_y);
            diag.boundary_leakage = std::max(diag.boundary_leakage, leak);
            if (leak > plan.leakage_threshold)
                throw BoundaryLeakage(t, leak);
        }
        record(t, amp);
        if (plan.stop) {
            const bool inside = central_probability(now, plan.stop->radius) >= plan.stop->threshold;
            if (armed && !inside) {
                diag.stopped_by_condition = true;
                break;
            }
            armed = armed || inside;
        }
    }
    if (plan.stop && !diag.stopped_by_condition)
        diag.warnings.push_back("stop condition not reached within the step budget");

    diag.steps_taken = done;
    traj.final_state = Wavefunction2D(gY, gy, std::move(amp));
    diag.norm_drift = std::abs(norm(traj.final_state) - std::sqrt(n0));
    diag.energy_final = energy(traj.final_state, potential);
    diag.energy_drift = std::abs(diag.energy_final - diag.energy_initial) /
                        std::max(std::abs(diag.energy_initial), 1e-300);
    return traj;
}

namespace {

// Shared 1D Strang loop; `potential_at(t_mid, out)` fills the potential for the step.
template <class PotentialAt>
Trajectory1D evolve_1d_impl(const Wavefunction1D& psi0, PotentialAt&& potential_at, bool static_potential,
                            const EvolutionPlan& plan)
{
    check_plan(plan);
    const double n0 = norm_squared(psi0);
    check_normalized(n0);
    const Grid1D& g = psi0.grid;
    const Index n = g.size();
    const Index band = band_points(n, plan.edge_fraction);

    Eigen::ArrayXcd work = psi0.amp;
    const FftPlan forward(work.data(), static_cast<int>(n), 1, 1, static_cast<int>(n), FftPlan::Direction::forward);
    const FftPlan backward(work.data(), static_cast<int>(n), 1, 1, static_cast<int>(n), FftPlan::Direction::backward);
    const Eigen::ArrayXd p = g.momenta_fft_order();
    const Eigen::ArrayXcd kinetic =
        (Complex(0.0, -0.5 * plan.dt) * p.square().cast<Complex>()).exp() / static_cast<double>(n);

    Trajectory1D traj;
    EvolutionDiagnostics& diag = traj.diagnostics;
    Eigen::ArrayXd v(n);
    potential_at(0.5 * plan.dt, v);
    {
        const Eigen::ArrayXd dens = psi0.amp.abs2();
        const double vmax = (dens > 1e-10 * dens.maxCoeff()).select(v.abs(), 0.0).maxCoeff();
        Eigen::ArrayXcd spec = psi0.amp;
        forward.execute(spec.data());
        warn_step_size(diag, plan.dt, vmax, significant_momentum(spec.abs2(), p));
    }
    if (static_potential)
        diag.energy_initial = energy(psi0, v);

    traj.times.push_back(0.0);
    traj.states.push_back(psi0);

    Eigen::ArrayXcd half;
    if (static_potential)
        half = (Complex(0.0, -0.5 * plan.dt) * v.cast<Complex>()).exp();

    const std::size_t stride = plan.record_every == 0 ? plan.n_steps : plan.record_every;
    double last_norm = std::sqrt(n0);
    std::size_t done = 0;
    while (done < plan.n_steps) {
        const std::size_t chunk = std::min(stride, plan.n_steps - done);
        for (std::size_t s = 0; s < chunk; ++s) {
            if (!static_potential) {
                potential_at((static_cast<double>(done + s) + 0.5) * plan.dt, v);
                half = (Complex(0.0, -0.5 * plan.dt) * v.cast<Complex>()).exp();
            }
            work *= half;
            forward.execute(work.data());
            work *= kinetic;
            backward.execute(work.data());
            work *= half;
        }
        done += chunk;
        const double t = static_cast<double>(done) * plan.dt;
        Wavefunction1D now(g, work);
        const double nrm = norm(now);
        diag.max_norm_drift_per_step =
            std::max(diag.max_norm_drift_per_step, std::abs(nrm - last_norm) / static_cast<double>(chunk));
        last_norm = nrm;
        if (plan.check_leakage) {
            const double leak = edge_probability(now, band);
            diag.boundary_leakage = std::max(diag.boundary_leakage, leak);
            if (leak > plan.leakage_threshold)
                throw BoundaryLeakage(t, leak);
        }
        traj.times.push_back(t);
        traj.states.push_back(std::move(now));
    }
    diag.steps_taken = done;
    diag.norm_drift = std::abs(norm(traj.final_state()) - std::sqrt(n0));
    if (static_potential) {
        diag.energy_final = energy(traj.final_state(), v);
        diag.energy_drift = std::abs(diag.energy_final - diag.energy_initial) /
                            std::max(std::abs(diag.energy_initial), 1e-300);
    }
    return traj;
}

} // namespace

Trajectory1D evolve_1d_parametric(const Wavefunction1D& psi0, const std::function<double(double)>& w,
                                  const EvolutionPlan& plan)
{
    const Eigen::ArrayXd half_y2 = 0.5 * psi0.grid.points().square();
    return evolve_1d_impl(
        psi0,
        [&](double t, Eigen::ArrayXd& out) {
            const double wt = w(t);
            if (!std::isfinite(wt))
                throw InvalidArgument("evolve_1d_parametric: w(t) is not finite");
            out = wt * half_y2;
        },
        false, plan);
}

Trajectory1D evolve_1d(const Wavefunction1D& psi0, const Eigen::ArrayXd& potential, const EvolutionPlan& plan)
{
    if (potential.size() != psi0.grid.size())
        throw InvalidArgument("evolve_1d: potential table does not match the grid");
    return evolve_1d_impl(psi0, [&](double, Eigen::ArrayXd& out) { out = potential; }, true, plan);
}

} // namespace decoh
