#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "decoh/potentials.hpp"

namespace decoh {

/// Center-of-mass path Y(t) sampled on a uniform lattice t_m = m*h, m = 0..M.
struct PathSample {
    double h;
    std::vector<double> Y;

    double horizon() const { return h * static_cast<double>(Y.size() - 1); }
    /// Linear interpolation between lattice samples.
    double at(double t) const;
};

/// Parametric driving of the internal oscillator, w(t) = 4k + 2 V''(Y(t)),
/// with Omega = (w + 1)/2 and beta = (Omega - 1)/2 in the unit-frequency
/// ladder basis (so Omega - 2 beta = 1 identically).
struct DrivingProfile {
    std::function<double(double)> w;
    double horizon;

    double omega(double t) const { return 0.5 * (w(t) + 1.0); }
    double beta(double t) const { return 0.5 * (omega(t) - 1.0); }

    static DrivingProfile constant(double w0, double horizon);
    static DrivingProfile along_path(const PathSample& path, const ExternalPotential& v, const HarmonicInternal& u);
};

/// Normal-ordered propagator
///   U(t) = e^{-i Phi(t)} e^{A} e^{E a+^2} (1 + D)^{a+ a} e^{F a^2},  a = (y + i p)/sqrt(2),
/// tabulated on a dense lattice of spacing dt/2 (even entries are integrator nodes).
struct PropagatorCoeffs {
    double dt = 0.0;
    Eigen::ArrayXd times;
    Eigen::ArrayXcd A, D, E, F;
    Eigen::ArrayXd phase; ///< Phi(t) = (1/2) int_0^t Omega
    double riccati_error = 0.0; ///< Richardson estimate of max |E| error

    Index size() const { return times.size(); }
    /// Dense-lattice index of t; throws if t is not a lattice point.
    Index index_of(double t) const;
};

/// Integrates i dE/dt = beta + 2 Omega E + 4 beta E^2, E(0) = 0, with classical RK4
/// at step dt (shrunk so that it divides the horizon) and cubic-Hermite dense
/// output at midpoints. Only E and times are filled. With `richardson`, the
/// solve is repeated at dt/2 to estimate the error.
/// Throws InvalidArgument if dt*max|Omega| > 0.05 and NumericalError if |E|
/// reaches 1/2 - 1e-6.
PropagatorCoeffs solve_riccati(const DrivingProfile& profile, double dt, bool richardson = true);

/// Fills A, D, F and the phase from E by cumulative Simpson quadrature:
///   A = -2i int beta E,  D = exp(-i int (Omega + 4 beta E)) - 1,
///   F = -i int beta (1 + D)^2,  Phi = (1/2) int Omega.
PropagatorCoeffs integrate_ADF(PropagatorCoeffs coeffs, const DrivingProfile& profile);

/// solve_riccati followed by integrate_ADF.
PropagatorCoeffs propagator_coefficients(const DrivingProfile& profile, double dt);

/// Unit-frequency Hermite functions h_0..h_{count-1} at the grid points, as (count x n).
Eigen::MatrixXd hermite_functions(const Grid1D& grid, Index count);

/// Applies U(t) to psi through its unit-frequency number-state expansion. The
/// expansion size starts at n_fock and doubles until the input is captured to
/// within 1e-8 of its norm; NumericalError once max_fock would be exceeded.
/// The factors are applied in 50-digit arithmetic and the output basis grows
/// until the upper half of it holds less than 1e-10 of the norm.
Wavefunction1D apply_propagator(const PropagatorCoeffs& coeffs, double t, const Wavefunction1D& psi,
                                Index n_fock = 64, Index max_fock = 512);

struct InfluenceOverlap {
    Complex functional;  ///< e^{-2i int (V(Y_A) - V(Y_B))} <psi_A|psi_B>
    Complex overlap;     ///< <psi_A|psi_B> of the normalized propagated states
    double magnitude;    ///< |<psi_A|psi_B>|
};

struct InfluenceOptions {
    double dt = 2.5e-4;
    Index n_fock = 64;
};

/// Influence-functional factor for two fixed center-of-mass paths on a common
/// lattice, in the second-order (V'' y^2) coupling approximation.
InfluenceOverlap influence_overlap(const Wavefunction1D& psi_i, const PathSample& path_a, const PathSample& path_b,
                                   const ExternalPotential& v, const HarmonicInternal& u,
                                   const InfluenceOptions& options = {});

/// The two propagator tables behind an influence_overlap evaluation.
struct InfluencePropagators {
    PropagatorCoeffs a;
    PropagatorCoeffs b;
};
InfluencePropagators influence_propagators(const PathSample& path_a, const PathSample& path_b,
                                           const ExternalPotential& v, const HarmonicInternal& u, double dt);

/// Classical center-of-mass trajectory of the rigid composite (mass 1 in 2V),
/// velocity-Verlet at step h. With `reflect_at`, the path is specularly
/// reflected the first time it reaches that coordinate.
PathSample classical_path(const ExternalPotential& v, double Y0, double P0, double horizon, double h,
                          std::optional<double> reflect_at = std::nullopt);

} // namespace decoh
