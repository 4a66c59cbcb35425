#pragma once

#include <string>
#include <vector>

#include "decoh/evolve.hpp"
#include "decoh/observables.hpp"
#include "decoh/parametric.hpp"

namespace decoh {

struct GridConfig {
    double com_min = -120.0;
    double com_max = 120.0;
    Index com_points = 2048;
    double int_min = -2.0;
    double int_max = 2.0;
    Index int_points = 256;

    Grid1D com() const { return {com_min, com_max, com_points}; }
    Grid1D internal() const { return {int_min, int_max, int_points}; }
};

struct ExperimentConfig {
    // Well seen by each constituent: depth mv0 / mass, width L, logistic edge
    // scale (0 selects the sharp square well).
    double mv0 = 2.64;
    double mass = 1.0;
    double width = 0.5;
    double edge_scale = 0.05;
    double k = 20.25;

    double Y0 = 20.0;
    double com_width_sq = 25.0;
    double p = 1.0;
    double xi0 = 0.0;
    double int_width_sq = 1.0 / 9.0;

    GridConfig grid;
    double dt = 0.005;
    double max_time = 80.0;
    double stop_radius = 5.0;
    double stop_threshold = 1e-4;
    std::size_t check_every = 100; ///< steps between stop and leakage checks
    double leakage_threshold = 1e-8;

    double xi0_min = 0.0;
    double xi0_max = 1.0;
    Index xi0_points = 21;
    GridConfig scan_grid{-819.2, 819.2, 8192, -3.0, 3.0, 128};
    unsigned threads = 0; ///< 0: hardware concurrency

    double mc_Y0_min = -20.0;
    double mc_Y0_max = 20.0;
    Index mc_Y0_points = 81;
    double mc_xi_min = -1.0;
    double mc_xi_max = 1.0;
    Index mc_xi_points = 21;
    bool mc_smoothed = false; ///< M_C maps use the sharp well unless set
    GridConfig mc_grid{-64.0, 64.0, 2048, -4.0, 4.0, 256};
    double wide_width = 20.0;
    double wide_narrow_width_sq = 1.0;
    std::string wide_narrow_axis = "com"; ///< "com" or "internal"

    double influence_edge_scale = 0.2;
    double influence_Y_start = -4.0;
    double influence_horizon = 8.0;
    double influence_path_step = 1e-3;
    double influence_dt = 2.5e-4;
    double influence_row_interval = 0.1;
    Index n_fock = 64;

    std::size_t seed = 12345;

    /// Depth per constituent, V0 = mv0 / mass.
    double depth() const { return mv0 / mass; }
    /// The external well of the 2D runs.
    ExternalPotential potential() const;
    HarmonicInternal internal() const { return {k}; }
    void validate() const;
};

struct ExperimentRecord {
    double xi0 = 0.0;
    double impurity = 0.0;
    double p_max = 0.0;
    double theta_star = 0.0;
    double fit_a = 0.0;
    double fit_abs_z = 0.0;
    double stop_time = 0.0;
    bool before_clear = false;
    EvolutionDiagnostics diagnostics;
    bool valid = true; ///< false when a diagnostic exceeds its threshold
};

/// Builds both interferometer branches, evolves them to the stop condition,
/// fits the leftward probability over the relative phase and measures the
/// impurity at the optimal phase. For an even well on a symmetric grid the
/// right branch is the center-of-mass mirror image of the evolved left branch.
ExperimentRecord run_scattering(const ExperimentConfig& config);

/// run_scattering at evenly spaced xi0, concurrently; records in xi0 order.
std::vector<ExperimentRecord> scan_xi0(const ExperimentConfig& config);

struct CompositenessRecord {
    double Y0;
    double xi;
    double q_mean;
    double q_sq_mean;
    double m_c;
};

/// M_C over the (Y0, xi) grid of the config, rows Y0-major.
std::vector<CompositenessRecord> scan_compositeness(const ExperimentConfig& config);

/// The wide-well variant: width wide_width and the narrow width applied to the
/// axis named by wide_narrow_axis.
ExperimentConfig wide_well_variant(const ExperimentConfig& config);

struct CrosscheckEntry {
    std::string profile;
    std::string state;
    double fidelity;
    double threshold;
    bool pass;
};

struct CrosscheckReport {
    std::vector<CrosscheckEntry> entries;
    bool pass;
};

struct NamedProfile {
    std::string name;
    DrivingProfile profile;
    double threshold;
};

struct NamedState {
    std::string name;
    Wavefunction1D psi;
};

/// Five driven profiles around w = 81 plus w = 1 (beta = 0), on horizon T.
std::vector<NamedProfile> default_profiles(double horizon = 2.0);
/// Ground, displaced (xi = 0.3) and first excited states of omega = 9.
std::vector<NamedState> default_states(const Grid1D& grid);

/// Fidelity |<grid|fock>|^2 between apply_propagator and evolve_1d_parametric
/// for every (profile, state) pair.
CrosscheckReport riccati_crosscheck(const std::vector<NamedProfile>& profiles, const std::vector<NamedState>& states,
                                    double riccati_dt = 2.5e-4, double grid_dt = 1e-4, Index n_fock = 64);

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& a, const std::vector<double>& b);

struct InfluenceRow {
    double t;
    Complex E, D, A, F;
    Complex overlap;
};

struct InfluenceStudy {
    std::vector<InfluenceRow> rows; ///< coefficients of the transmitted path
    InfluenceOverlap final_overlap;
};

/// Internal lattice of the number-basis studies: wide enough for the
/// unit-frequency Hermite functions of a few hundred quanta.
inline Grid1D influence_grid() { return {-16.0, 16.0, 1024}; }

/// Transmitted and reflected classical paths through the influence well, with
/// the overlap of the two propagated internal states sampled every
/// influence_row_interval.
InfluenceStudy influence_study(const ExperimentConfig& config);

} // namespace decoh
