#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "decoh/potentials.hpp"
#include "decoh/spectral.hpp"

namespace decoh {

/// Run until the probability inside |Y| < radius drops below threshold after
/// having reached it (checked at every record point), or until the step budget is spent.
struct StopCondition {
    double radius = 5.0;
    double threshold = 1e-4;
};

struct EvolutionPlan {
    double dt = 0.005;          ///< nonzero; negative runs the evolution backwards
    std::size_t n_steps = 0;    ///< step budget
    std::size_t record_every = 0; ///< 0: record only the initial and final states
    std::optional<StopCondition> stop;
    bool capture_fields = false; ///< keep full 2D fields in snapshots
    double leakage_threshold = 1e-8;
    double edge_fraction = 1.0 / 64.0; ///< edge band width as a fraction of the axis, at least 4 points
    bool check_leakage = true;
};

struct EvolutionDiagnostics {
    double max_norm_drift_per_step = 0.0;
    double norm_drift = 0.0;       ///< | ||psi(T)|| - ||psi(0)|| |
    double energy_initial = 0.0;   ///< static potentials only
    double energy_final = 0.0;
    double energy_drift = 0.0;     ///< relative
    double boundary_leakage = 0.0; ///< largest edge-band probability seen
    std::size_t steps_taken = 0;
    bool stopped_by_condition = false;
    std::vector<std::string> warnings;
};

/// Thrown when probability reaches the edge band of the periodic lattice.
class BoundaryLeakage : public NumericalError {
public:
    BoundaryLeakage(double time, double leakage);
    double time;
    double leakage;
};

struct Snapshot2D {
    double t;
    double norm;
    Eigen::ArrayXd marginal_Y; ///< integral over y of |Psi|^2
    Eigen::ArrayXd marginal_y;
    std::optional<Wavefunction2D> field;
};

struct Trajectory2D {
    std::vector<Snapshot2D> snapshots;
    Wavefunction2D final_state;
    EvolutionDiagnostics diagnostics;
};

struct Trajectory1D {
    std::vector<double> times;
    std::vector<Wavefunction1D> states;
    EvolutionDiagnostics diagnostics;

    const Wavefunction1D& final_state() const { return states.back(); }
};

/// Strang split-step propagator for a static potential on the joint lattice.
/// Owns its FFT workspace; one instance per concurrent evolution.
class SplitStepper2D {
public:
    SplitStepper2D(const Grid1D& grid_Y, const Grid1D& grid_y, const Eigen::ArrayXXd& potential, double dt);

    /// Advances amp (nY x ny) by `steps` full steps.
    void advance(Eigen::ArrayXXcd& amp, std::size_t steps);
    double dt() const { return dt_; }

private:
    double dt_;
    Eigen::ArrayXXcd work_;
    Eigen::ArrayXXcd half_potential_;
    Eigen::ArrayXXcd full_potential_;
    Eigen::ArrayXXcd kinetic_;
    FftPlan forward_;
    FftPlan backward_;
};

/// Evolution of a joint state under p_Y^2/2 + p_y^2/2 + V(Y+y) + V(Y-y) + U(y).
Trajectory2D evolve_2d(const Wavefunction2D& psi0, const ExternalPotential& v, const HarmonicInternal& u,
                       const EvolutionPlan& plan);

/// Same with an explicit potential table (nY x ny).
Trajectory2D evolve_2d(const Wavefunction2D& psi0, const Eigen::ArrayXXd& potential, const EvolutionPlan& plan);

/// Evolution under p^2/2 + w(t) y^2/2, w sampled at each step's midpoint.
Trajectory1D evolve_1d_parametric(const Wavefunction1D& psi0, const std::function<double(double)>& w,
                                  const EvolutionPlan& plan);

/// Evolution under p^2/2 + V(x) for a static potential table.
Trajectory1D evolve_1d(const Wavefunction1D& psi0, const Eigen::ArrayXd& potential, const EvolutionPlan& plan);

/// <p^2/2> (spectral) + <V> (pointwise) of the normalized state.
double energy(const Wavefunction1D& psi, const Eigen::ArrayXd& potential);
double energy(const Wavefunction2D& psi, const Eigen::ArrayXXd& potential);
double energy(const Wavefunction2D& psi, const ExternalPotential& v, const HarmonicInternal& u);

double kinetic_energy(const Wavefunction1D& psi);

/// Probability of the joint state in |Y| < radius.
double central_probability(const Wavefunction2D& psi, double radius);

} // namespace decoh
