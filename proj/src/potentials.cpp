#include "decoh/potentials.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

namespace decoh {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Logistic step and its derivatives written through tanh, finite for any u.
struct Logistic {
    double t;
    explicit Logistic(double u) : t(std::tanh(0.5 * u)) {}
    double value() const { return 0.5 * (1.0 + t); }
    double d1() const { return 0.25 * (1.0 - t * t); }
    double d2() const { return -0.25 * t * (1.0 - t * t); }
};

} // namespace

double HarmonicInternal::omega() const { return std::sqrt(4.0 * k); }

void validate(const ExternalPotential& v)
{
    std::visit(overloaded{
                   [](const SquareWell& w) {
                       if (!(w.depth >= 0.0) || !(w.width > 0.0))
                           throw InvalidArgument("SquareWell: need depth >= 0 and width > 0");
                   },
                   [](const SmoothedWell& w) {
                       if (!(w.depth >= 0.0) || !(w.width > 0.0) || !(w.edge_scale > 0.0))
                           throw InvalidArgument("SmoothedWell: need depth >= 0, width > 0, edge_scale > 0");
                   },
                   [](const QuadraticExternal& q) {
                       if (!std::isfinite(q.c0) || !std::isfinite(q.c1) || !std::isfinite(q.c2))
                           throw InvalidArgument("QuadraticExternal: coefficients must be finite");
                   },
               },
               v);
}

void validate(const HarmonicInternal& u)
{
    if (!(u.k > 0.0))
        throw InvalidArgument("HarmonicInternal: spring constant must be positive");
}

double value(const ExternalPotential& v, double x)
{
    return std::visit(overloaded{
                          [x](const SquareWell& w) {
                              return std::abs(x) <= 0.5 * w.width ? -w.depth : 0.0;
                          },
                          [x](const SmoothedWell& w) {
                              const double s = w.edge_scale;
                              return -w.depth * (Logistic((x + 0.5 * w.width) / s).value() -
                                                 Logistic((x - 0.5 * w.width) / s).value());
                          },
                          [x](const QuadraticExternal& q) { return q.c0 + x * (q.c1 + x * q.c2); },
                      },
                      v);
}

double first_derivative(const ExternalPotential& v, double x)
{
    return std::visit(overloaded{
                          [](const SquareWell&) -> double {
                              throw InvalidArgument(
                                  "first_derivative: a square well is only differentiable away from "
                                  "x = +-L/2; use SmoothedWell");
                          },
                          [x](const SmoothedWell& w) {
                              const double s = w.edge_scale;
                              return -w.depth / s *
                                     (Logistic((x + 0.5 * w.width) / s).d1() -
                                      Logistic((x - 0.5 * w.width) / s).d1());
                          },
                          [x](const QuadraticExternal& q) { return q.c1 + 2.0 * q.c2 * x; },
                      },
                      v);
}

double second_derivative(const ExternalPotential& v, double x)
{
    return std::visit(overloaded{
                          [](const SquareWell&) -> double {
                              throw InvalidArgument(
                                  "second_derivative: V'' of a square well vanishes everywhere except "
                                  "at x = +-L/2, where it is distributional; use SmoothedWell");
                          },
                          [x](const SmoothedWell& w) {
                              const double s = w.edge_scale;
                              return -w.depth / (s * s) *
                                     (Logistic((x + 0.5 * w.width) / s).d2() -
                                      Logistic((x - 0.5 * w.width) / s).d2());
                          },
                          [](const QuadraticExternal& q) { return 2.0 * q.c2; },
                      },
                      v);
}

bool is_even(const ExternalPotential& v)
{
    if (const auto* q = std::get_if<QuadraticExternal>(&v))
        return q->c1 == 0.0;
    return true;
}

double composite_potential(const ExternalPotential& v, const HarmonicInternal& u, double Y, double y)
{
    return value(v, Y + y) + value(v, Y - y) + u.value(y);
}

Eigen::ArrayXXd composite_potential(const ExternalPotential& v, const HarmonicInternal& u,
                                    const Grid1D& grid_Y, const Grid1D& grid_y)
{
    const double h = grid_Y.dx();
    Eigen::ArrayXXd out(grid_Y.size(), grid_y.size());
    for (Index j = 0; j < grid_y.size(); ++j) {
        const double y = grid_y.x(j);
        for (Index i = 0; i < grid_Y.size(); ++i) {
            const double Y = grid_Y.x(i);
            out(i, j) = lattice_value(v, Y + y, h) + lattice_value(v, Y - y, h) + u.value(y);
        }
    }
    return out;
}

ScatteringProbabilities analytic_RT(double p, const SquareWell& well, double mass)
{
    if (!(p > 0.0))
        throw InvalidArgument("analytic_RT: momentum must be positive");
    validate(ExternalPotential{well});
    const double mv = mass * well.depth;
    const double pt = std::sqrt(p * p + 2.0 * mv);
    const double s = std::sin(well.width * pt);
    const double s2 = s * s;
    const double p2 = p * p;
    const double den = 2.0 * p2 * p2 + 4.0 * mv * p2 + 2.0 * mv * mv * s2;
    return {2.0 * mv * mv * s2 / den, 2.0 * p2 * (p2 + 2.0 * mv) / den};
}

double calibrate_beam_splitter(double p, double width, double target, double mass)
{
    if (!(p > 0.0) || !(width > 0.0) || !(mass > 0.0))
        throw InvalidArgument("calibrate_beam_splitter: p, width and mass must be positive");
    if (target < 0.0 || target >= 1.0)
        throw InvalidArgument("calibrate_beam_splitter: target must lie in [0, 1)");
    if (target == 0.0)
        return 0.0;

    const auto reflection = [&](double mv) {
        return analytic_RT(p, SquareWell{mv / mass, width}, mass).reflection;
    };

    // |R|^2 vanishes again where width * sqrt(p^2 + 2 mV0) reaches the next multiple of pi.
    const double next_zero_phase = kPi * (std::floor(p * width / kPi) + 1.0);
    const double mv_zero = 0.5 * ((next_zero_phase / width) * (next_zero_phase / width) - p * p);

    const auto peak = boost::math::tools::brent_find_minima(
        [&](double mv) { return -reflection(mv); }, 0.0, mv_zero, 52);
    const double mv_peak = peak.first;
    const double r_peak = -peak.second;
    if (target > r_peak)
        throw NumericalError("calibrate_beam_splitter: no root in bracket, maximum |R|^2 on the first "
                             "branch is " + std::to_string(r_peak));

    std::uintmax_t iterations = 200;
    const auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-10; };
    const auto [lo, hi] = boost::math::tools::toms748_solve(
        [&](double mv) { return reflection(mv) - target; }, 0.0, mv_peak, -target, r_peak - target,
        tol, iterations);
    return 0.5 * (lo + hi);
}

} // namespace decoh

namespace decoh {

double lattice_value(const ExternalPotential& v, double x, double h)
{
    if (const auto* w = std::get_if<SquareWell>(&v)) {
        const double lo = std::max(x - 0.5 * h, -0.5 * w->width);
        const double hi = std::min(x + 0.5 * h, 0.5 * w->width);
        return hi > lo ? -w->depth * (hi - lo) / h : 0.0;
    }
    return value(v, x);
}

Eigen::ArrayXd tabulate(const ExternalPotential& v, const Grid1D& grid)
{
    Eigen::ArrayXd out(grid.size());
    for (Index j = 0; j < grid.size(); ++j)
        out(j) = lattice_value(v, grid.x(j), grid.dx());
    return out;
}

} // namespace decoh
