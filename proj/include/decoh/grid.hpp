#pragma once

#include "decoh/core.hpp"

namespace decoh {

/// Uniform periodic lattice x_j = x_min + j*dx, j = 0..n-1, dx = (x_max - x_min)/n.
/// n is a power of two, at least 8.
class Grid1D {
public:
    Grid1D(double x_min, double x_max, Index n);

    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    Index size() const { return n_; }
    double dx() const { return (x_max_ - x_min_) / static_cast<double>(n_); }
    double x(Index j) const { return x_min_ + static_cast<double>(j) * dx(); }
    Eigen::ArrayXd points() const;

    double dp() const { return 2.0 * kPi / (static_cast<double>(n_) * dx()); }
    double p_max() const { return kPi / dx(); }
    /// Momenta in discrete-Fourier order (0, dp, ..., -p_max, ..., -dp).
    Eigen::ArrayXd momenta_fft_order() const;
    /// The momentum lattice [-p_max, p_max) as a grid of its own.
    Grid1D momentum_grid() const;

    friend bool operator==(const Grid1D& a, const Grid1D& b)
    {
        return a.x_min_ == b.x_min_ && a.x_max_ == b.x_max_ && a.n_ == b.n_;
    }

private:
    double x_min_;
    double x_max_;
    Index n_;
};

struct Wavefunction1D {
    Grid1D grid;
    Eigen::ArrayXcd amp;

    Wavefunction1D(Grid1D g, Eigen::ArrayXcd a);
};

/// Joint state on the (center-of-mass Y, internal y) lattice; amp(iY, iy).
struct Wavefunction2D {
    Grid1D grid_Y;
    Grid1D grid_y;
    Eigen::ArrayXXcd amp;

    Wavefunction2D(Grid1D gY, Grid1D gy, Eigen::ArrayXXcd a);
};

double norm_squared(const Wavefunction1D& psi);
double norm_squared(const Wavefunction2D& psi);
double norm(const Wavefunction1D& psi);
double norm(const Wavefunction2D& psi);

/// <a|b>, antilinear in the first argument.
Complex inner(const Wavefunction1D& a, const Wavefunction1D& b);
Complex inner(const Wavefunction2D& a, const Wavefunction2D& b);

Wavefunction1D normalized(Wavefunction1D psi);
Wavefunction2D normalized(Wavefunction2D psi);

/// exp(-(x-center)^2/(2 width_sq) + i momentum x + i phase), renormalized.
/// Throws if width_sq <= 0 or if the normalized density at either grid edge
/// exceeds 1e-12 (the packet would be clipped).
Wavefunction1D make_gaussian_1d(const Grid1D& grid, double center, double width_sq,
                                double momentum, double phase = 0.0);

/// (a + e^{i rel_phase} b), renormalized. Throws on grid mismatch or when the
/// two branches cancel.
Wavefunction1D superpose(const Wavefunction1D& a, const Wavefunction1D& b, double rel_phase);
Wavefunction2D superpose(const Wavefunction2D& a, const Wavefunction2D& b, double rel_phase);

/// phi(Y) psi(y).
Wavefunction2D product_state(const Wavefunction1D& com, const Wavefunction1D& internal);

/// Psi(Y, y) -> Psi(-Y, y) on the periodic lattice (index j -> (n - j) mod n).
/// Requires x_min = -x_max.
Wavefunction2D mirror_com(const Wavefunction2D& psi);

/// Probability of the normalized state in the outermost `band` points on each side.
double edge_probability(const Wavefunction1D& psi, Index band);
/// Largest edge-band probability over both axes.
double edge_probability(const Wavefunction2D& psi, Index band_Y, Index band_y);

bool is_power_of_two(Index n);

} // namespace decoh
