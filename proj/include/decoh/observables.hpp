#pragma once

#include <functional>

#include "decoh/potentials.hpp"

namespace decoh {

/// Internal-coordinate density matrix on the internal grid, with the cell
/// measure folded in: rho(i,j) = dY dy sum_Y Psi(Y,y_i) conj(Psi(Y,y_j)),
/// so trace(rho) = 1 for a normalized state.
struct ReducedDensityMatrix {
    Eigen::MatrixXcd rho;

    Index dimension() const { return rho.rows(); }
};

ReducedDensityMatrix partial_trace_internal(const Wavefunction2D& psi);

/// 1 - sum |rho(i,j)|^2.
double impurity(const ReducedDensityMatrix& rho);

struct LeftwardProbability {
    double probability;
    /// Set when more than 1e-4 of the probability is still within |Y| < 5.
    bool before_clear;
};

/// Probability of negative center-of-mass momentum. The p = 0 and Nyquist bins
/// are shared evenly, so the hemispheres partition and swap exactly under Y -> -Y.
LeftwardProbability leftward_probability(const Wavefunction2D& psi);
double leftward_probability(const Wavefunction1D& psi);

struct ThetaFit {
    double theta_star;
    double p_max;
    double a;   ///< mean of P(theta)
    Complex z;  ///< P(theta) = a + Re(z e^{i theta})
    double confirmation; ///< P(theta_star) measured directly
};

/// Recovers P(theta) = a + Re(z e^{i theta}) from theta in {0, pi/2, pi} and
/// confirms at the maximizer. Throws NumericalError if the confirmation
/// differs from the fitted maximum by more than 1e-4.
ThetaFit optimize_theta(const std::function<double(double)>& leftward);

/// Same fit from the three samples already taken, plus a confirmation run.
ThetaFit fit_theta(double p0, double p_half_pi, double p_pi, const std::function<double(double)>& leftward);

enum class QMode { exact, taylor };

/// Q(Y) = <psi| V(Y+y) + V(Y-y) - 2V(Y) |psi>, on the center-of-mass grid.
struct QProfile {
    Grid1D grid;
    Eigen::ArrayXd q;
    QMode mode;
};

/// exact: quadrature over the internal grid; for a square well the indicator
/// integrals come from the band-limited interpolant of |psi|^2, so the wells
/// edges are resolved exactly. taylor: V''(Y) <y^2>; InvalidArgument for SquareWell.
QProfile q_profile(const ExternalPotential& v, const Wavefunction1D& psi, const Grid1D& grid_Y, QMode mode);

struct Compositeness {
    double q_mean;
    double q_sq_mean;
    double m_c;     ///< sqrt(<Q^2> - <Q>^2) over |phi|^2
    double dt_min;  ///< 1/(2 M_C); infinite when M_C = 0
};

Compositeness compositeness(const QProfile& q, const Wavefunction1D& phi);

} // namespace decoh
