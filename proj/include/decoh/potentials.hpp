#pragma once

#include <variant>

#include "decoh/grid.hpp"

namespace decoh {

/// 0 outside |x| <= L/2, -depth inside.
struct SquareWell {
    double depth; ///< V0 >= 0
    double width; ///< L > 0
};

/// -depth * (sigma((x + L/2)/s) - sigma((x - L/2)/s)), sigma the logistic step.
struct SmoothedWell {
    double depth;
    double width;
    double edge_scale; ///< s > 0
};

/// c0 + c1 x + c2 x^2.
struct QuadraticExternal {
    double c0;
    double c1;
    double c2;
};

using ExternalPotential = std::variant<SquareWell, SmoothedWell, QuadraticExternal>;

/// Spring between the constituents: U(y) = 2 k y^2, natural frequency sqrt(4k).
struct HarmonicInternal {
    double k;

    double value(double y) const { return 2.0 * k * y * y; }
    double omega() const;
};

/// Throws InvalidArgument on non-physical parameters.
void validate(const ExternalPotential& v);
void validate(const HarmonicInternal& u);

double value(const ExternalPotential& v, double x);
/// Throws InvalidArgument for SquareWell, whose derivatives are distributional at the edges.
double first_derivative(const ExternalPotential& v, double x);
double second_derivative(const ExternalPotential& v, double x);

template <class Derived>
Eigen::ArrayXd value(const ExternalPotential& v, const Eigen::ArrayBase<Derived>& x)
{
    return x.derived().unaryExpr([&v](double xi) { return value(v, xi); });
}

template <class Derived>
Eigen::ArrayXd second_derivative(const ExternalPotential& v, const Eigen::ArrayBase<Derived>& x)
{
    return x.derived().unaryExpr([&v](double xi) { return second_derivative(v, xi); });
}

/// True when V(-x) = V(x) holds exactly.
bool is_even(const ExternalPotential& v);

/// V(Y + y) + V(Y - y) + U(y), without any Taylor expansion.
double composite_potential(const ExternalPotential& v, const HarmonicInternal& u, double Y, double y);
/// The same, tabulated on the joint lattice as (nY x ny) with lattice_value
/// sampling along the center-of-mass spacing.
Eigen::ArrayXXd composite_potential(const ExternalPotential& v, const HarmonicInternal& u,
                                    const Grid1D& grid_Y, const Grid1D& grid_y);

struct ScatteringProbabilities {
    double reflection;   ///< |R|^2
    double transmission; ///< |T|^2
};

/// Plane-wave reflection and transmission probabilities of a square well for a
/// particle of the given mass and momentum p > 0.
ScatteringProbabilities analytic_RT(double p, const SquareWell& well, double mass = 1.0);

/// Product mass * depth at which a well of width L reflects `target` of a plane
/// wave with momentum p, on the first branch of |R|^2 rising from zero depth.
double calibrate_beam_splitter(double p, double width, double target, double mass = 1.0);

} // namespace decoh

namespace decoh {

/// Value used when a potential is tabulated on a lattice of spacing h: the
/// average over the cell [x - h/2, x + h/2] for a square well (so the well
/// keeps its exact width on any lattice), the point value otherwise.
double lattice_value(const ExternalPotential& v, double x, double h);

/// lattice_value at every grid point.
Eigen::ArrayXd tabulate(const ExternalPotential& v, const Grid1D& grid);

} // namespace decoh
