#include <catch_amalgamated.hpp>

#include <random>

#include "decoh/potentials.hpp"

using namespace decoh;
using Catch::Approx;

namespace {

// Textbook transmission through a well of depth V0: 1/T = 1 + V0^2 sin^2(k L) / (4 E (E + V0)).
double textbook_reflection(double p, double depth, double width, double mass)
{
    const double e = p * p / (2.0 * mass);
    const double k = std::sqrt(2.0 * mass * (e + depth));
    const double s = std::sin(k * width);
    const double inv_t = 1.0 + depth * depth * s * s / (4.0 * e * (e + depth));
    return 1.0 - 1.0 / inv_t;
}

// Reflection of an arbitrary short-range potential by integrating the
// stationary equation from a pure transmitted wave on the right.
double integrated_reflection(const ExternalPotential& v, double p, double extent)
{
    using Vec = Eigen::Vector4d; // Re psi, Im psi, Re psi', Im psi'
    const double e = 0.5 * p * p;
    const auto rhs = [&](double x, const Vec& s) {
        const double f = 2.0 * (value(v, x) - e);
        return Vec(s(2), s(3), f * s(0), f * s(1));
    };
    const double h = 1e-4;
    double x = extent;
    Vec s(std::cos(p * x), std::sin(p * x), -p * std::sin(p * x), p * std::cos(p * x));
    while (x > -extent + 0.5 * h) {
        const Vec k1 = rhs(x, s);
        const Vec k2 = rhs(x - 0.5 * h, s - 0.5 * h * k1);
        const Vec k3 = rhs(x - 0.5 * h, s - 0.5 * h * k2);
        const Vec k4 = rhs(x - h, s - h * k3);
        s -= h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        x -= h;
    }
    // psi = a e^{ipx} + b e^{-ipx} on the left.
    const Complex psi(s(0), s(1)), dpsi(s(2), s(3));
    const Complex a = 0.5 * (psi + dpsi / (kI * p)) * std::exp(-kI * p * x);
    const Complex b = 0.5 * (psi - dpsi / (kI * p)) * std::exp(kI * p * x);
    return std::norm(b / a);
}

} // namespace

TEST_CASE("reflection formula matches the textbook well")
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> up(0.1, 4.0), uL(0.05, 3.0), uV(0.0, 20.0), um(0.5, 2.0);
    for (int i = 0; i < 200; ++i) {
        const double p = up(rng), L = uL(rng), mv0 = uV(rng), m = um(rng);
        const ScatteringProbabilities rt = analytic_RT(p, SquareWell{mv0 / m, L}, m);
        CHECK(rt.reflection == Approx(textbook_reflection(p, mv0 / m, L, m)).margin(1e-12));
    }
}

TEST_CASE("reflection and transmission sum to one")
{
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> up(1e-3, 10.0), uL(1e-3, 10.0), uV(0.0, 100.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const ScatteringProbabilities rt = analytic_RT(up(rng), SquareWell{uV(rng), uL(rng)});
        worst = std::max(worst, std::abs(rt.reflection + rt.transmission - 1.0));
    }
    CHECK(worst <= 1e-12);
    CHECK_THROWS_AS(analytic_RT(0.0, SquareWell{1.0, 1.0}), InvalidArgument);
}

TEST_CASE("beam splitter calibration")
{
    CHECK(analytic_RT(1.0, SquareWell{2.64, 0.5}).reflection == Approx(0.5).margin(1e-3));
    const double mv0 = calibrate_beam_splitter(1.0, 0.5, 0.5);
    CHECK(mv0 == Approx(2.64).margin(0.01));
    CHECK(analytic_RT(1.0, SquareWell{mv0, 0.5}).reflection == Approx(0.5).margin(1e-9));
    CHECK(calibrate_beam_splitter(1.0, 0.5, 0.0) == 0.0);
    CHECK(analytic_RT(1.0, SquareWell{calibrate_beam_splitter(1.0, 0.5, 0.2), 0.5}).reflection ==
          Approx(0.2).margin(1e-9));
    CHECK_THROWS_AS(calibrate_beam_splitter(1.0, 0.5, 1.0), InvalidArgument);
    CHECK_THROWS_AS(calibrate_beam_splitter(1.0, 0.5, -0.1), InvalidArgument);
}

TEST_CASE("stationary integration reproduces the square-well reflection")
{
    const double r = integrated_reflection(SquareWell{2.64, 0.5}, 1.0, 1.0);
    CHECK(r == Approx(analytic_RT(1.0, SquareWell{2.64, 0.5}).reflection).margin(1e-4));
}

TEST_CASE("smoothed reflection converges to the square well as the edge sharpens")
{
    const double sharp = analytic_RT(1.0, SquareWell{2.64, 0.5}).reflection;
    double prev = 1.0;
    for (double s : {0.05, 0.025, 0.0125, 0.00625}) {
        const double dev = std::abs(integrated_reflection(SmoothedWell{2.64, 0.5, s}, 1.0, 3.0) - sharp);
        CHECK(dev < prev);
        prev = dev;
    }
    CHECK(prev / sharp < 0.01);
}

TEST_CASE("composite potential is even in the internal coordinate")
{
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const HarmonicInternal spring{20.25};
    for (const ExternalPotential& v : {ExternalPotential{SquareWell{2.64, 0.5}},
                                       ExternalPotential{SmoothedWell{2.64, 0.5, 0.05}},
                                       ExternalPotential{QuadraticExternal{0.3, -1.2, 0.7}}}) {
        for (int i = 0; i < 1000; ++i) {
            const double Y = u(rng), y = u(rng);
            CHECK(composite_potential(v, spring, Y, y) == composite_potential(v, spring, Y, -y));
        }
    }
}

TEST_CASE("smoothed well approaches the square well off the edges")
{
    // A logistic edge decays as e^{-|x|/s}; the band is 14 s so that e^{-14} < 1e-6.
    const double s = 1e-3, depth = 2.64, L = 0.5;
    const ExternalPotential smooth = SmoothedWell{depth, L, s};
    const ExternalPotential sharp = SquareWell{depth, L};
    double worst = 0.0;
    for (double x = -2.0; x <= 2.0; x += 1e-4) {
        if (std::abs(std::abs(x) - 0.5 * L) < 14.0 * s) continue;
        worst = std::max(worst, std::abs(value(smooth, x) - value(sharp, x)));
    }
    CHECK(worst < 1e-6 * depth);
}

TEST_CASE("smoothed well derivatives agree with finite differences")
{
    const ExternalPotential v = SmoothedWell{2.64, 0.5, 0.05};
    for (double x : {-0.4, -0.25, -0.2, 0.0, 0.23, 0.3, 0.7}) {
        const double h = 1e-4;
        const double d1 = (value(v, x + h) - value(v, x - h)) / (2.0 * h);
        const double d2 = (value(v, x + h) - 2.0 * value(v, x) + value(v, x - h)) / (h * h);
        CHECK(first_derivative(v, x) == Approx(d1).epsilon(1e-6).margin(1e-6));
        CHECK(second_derivative(v, x) == Approx(d2).epsilon(1e-5).margin(1e-3));
    }
    // Far from the edges the logistic tanh form must not overflow.
    CHECK(std::isfinite(second_derivative(v, 1e4)));
    CHECK(second_derivative(v, 1e4) == 0.0);
}

TEST_CASE("square well has no pointwise second derivative")
{
    CHECK_THROWS_AS(second_derivative(SquareWell{1.0, 1.0}, 0.0), InvalidArgument);
    CHECK_THROWS_AS(first_derivative(SquareWell{1.0, 1.0}, 0.0), InvalidArgument);
    CHECK(second_derivative(QuadraticExternal{1.0, 2.0, 3.0}, 5.0) == 6.0);
}

TEST_CASE("parameters are validated")
{
    CHECK_THROWS_AS(validate(SquareWell{1.0, -1.0}), InvalidArgument);
    CHECK_THROWS_AS(validate(SmoothedWell{1.0, 1.0, 0.0}), InvalidArgument);
    CHECK_THROWS_AS(validate(HarmonicInternal{0.0}), InvalidArgument);
    CHECK_NOTHROW(validate(SquareWell{0.0, 0.5}));
    CHECK(HarmonicInternal{20.25}.omega() == Approx(9.0));
}

TEST_CASE("lattice sampling keeps the square well width")
{
    const SquareWell w{2.0, 0.5};
    const double h = 0.2;
    // Cell [0.15, 0.35] is half inside the well.
    CHECK(lattice_value(w, 0.25, h) == Approx(-1.0));
    CHECK(lattice_value(w, 0.0, h) == -2.0);
    CHECK(lattice_value(w, 1.0, h) == 0.0);
    const Grid1D g(-8.0, 8.0, 256);
    const Eigen::ArrayXd t = tabulate(w, g);
    CHECK(-t.sum() * g.dx() == Approx(w.depth * w.width).margin(1e-12));
    const ExternalPotential smooth = SmoothedWell{2.0, 0.5, 0.05};
    CHECK(lattice_value(smooth, 0.1, h) == value(smooth, 0.1));
}

TEST_CASE("evenness of external potentials")
{
    CHECK(is_even(SquareWell{1.0, 1.0}));
    CHECK(is_even(SmoothedWell{1.0, 1.0, 0.1}));
    CHECK(is_even(QuadraticExternal{1.0, 0.0, 2.0}));
    CHECK_FALSE(is_even(QuadraticExternal{1.0, 0.5, 2.0}));
}
