#include <catch_amalgamated.hpp>

#include "decoh/evolve.hpp"
#include "decoh/experiments.hpp"
#include "decoh/parametric.hpp"

using namespace decoh;
using Catch::Approx;

namespace {

// Constant-w oracle from linearizing E = -i u'/(4 beta u):
// u'' + 2i Omega u' - 4 beta^2 u = 0 with u(0) = 1, E(0) = 0.
Complex closed_form_E(double w, double t)
{
    const double omega = 0.5 * (w + 1.0), beta = 0.5 * (omega - 1.0), wt = std::sqrt(w);
    return -kI * beta * std::sin(wt * t) / (wt * std::cos(wt * t) + kI * omega * std::sin(wt * t));
}

Complex riccati_rhs(double w, Complex e)
{
    const double omega = 0.5 * (w + 1.0), beta = 0.5 * (omega - 1.0);
    return -kI * (beta + 2.0 * omega * e + 4.0 * beta * e * e);
}

Wavefunction1D number_state(const Grid1D& g, Index n)
{
    const Eigen::MatrixXd h = hermite_functions(g, n + 1);
    return Wavefunction1D(g, h.row(n).transpose().cast<Complex>().array());
}

} // namespace

TEST_CASE("closed form satisfies the Riccati equation")
{
    for (double w : {81.0, 20.0, 2.5}) {
        const double omega = 0.5 * (w + 1.0), beta = 0.5 * (omega - 1.0);
        CHECK(omega * omega - 4.0 * beta * beta == Approx(w).epsilon(1e-14));
        const double h = 1e-5;
        for (double t = 0.05; t < 1.4; t += 0.0931) {
            const Complex fd = (closed_form_E(w, t + h) - closed_form_E(w, t - h)) / (2.0 * h);
            CHECK(std::abs(fd - riccati_rhs(w, closed_form_E(w, t))) < 1e-6 * (1.0 + std::abs(fd)));
        }
    }
}

TEST_CASE("riccati solution matches the closed form over two periods")
{
    const double T = 4.0 * kPi / 9.0;
    const PropagatorCoeffs c = solve_riccati(DrivingProfile::constant(81.0, T), 2.5e-4);
    double err = 0.0;
    for (Index i = 0; i < c.size(); ++i) err = std::max(err, std::abs(c.E(i) - closed_form_E(81.0, c.times(i))));
    CHECK(err < 1e-8);
    CHECK(c.riccati_error < 1e-8);
    CHECK(c.times(c.size() - 1) == Approx(T).epsilon(1e-14));
}

TEST_CASE("profile definitions")
{
    const DrivingProfile p{[](double t) { return 81.0 + 10.0 * std::exp(-(t - 1.0) * (t - 1.0)); }, 2.0};
    for (double t = 0.0; t <= 2.0; t += 0.173) CHECK(std::abs(p.omega(t) - 2.0 * p.beta(t) - 1.0) <= 1e-12);
}

TEST_CASE("unit driving is a pure rotation")
{
    const PropagatorCoeffs c = propagator_coefficients(DrivingProfile::constant(1.0, 3.0), 1e-3);
    CHECK(c.E.abs().maxCoeff() == 0.0);
    CHECK(c.A.abs().maxCoeff() == 0.0);
    CHECK(c.F.abs().maxCoeff() == 0.0);
    for (Index i = 0; i < c.size(); ++i) CHECK(std::abs(c.D(i) - (std::exp(-kI * c.times(i)) - 1.0)) < 1e-10);
}

TEST_CASE("coefficient invariants along the test profiles")
{
    for (const NamedProfile& np : default_profiles()) {
        INFO(np.name);
        const PropagatorCoeffs c = propagator_coefficients(np.profile, 2.5e-4);
        CHECK(std::abs(c.A(0)) == 0.0);
        CHECK(std::abs(c.D(0)) == 0.0);
        CHECK(std::abs(c.E(0)) == 0.0);
        CHECK(std::abs(c.F(0)) == 0.0);
        CHECK(c.E.abs().maxCoeff() < 0.5);
        CHECK((1.0 + c.D).abs().maxCoeff() <= 1.0 + 1e-12);
        // Bogoliubov normal form: |e^A|^2 = |1 + D| = sqrt(1 - 4|E|^2).
        const Eigen::ArrayXd eA2 = (2.0 * c.A.real()).exp();
        CHECK((eA2 - (1.0 + c.D).abs()).abs().maxCoeff() < 1e-8);
        CHECK(((1.0 - 4.0 * c.E.abs2()).sqrt() - (1.0 + c.D).abs()).abs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("D and F satisfy their equations of motion")
{
    const DrivingProfile p{[](double t) { return 81.0 + 20.0 * std::sin(3.0 * t); }, 2.0};
    const PropagatorCoeffs c = propagator_coefficients(p, 2.5e-4);
    const double h = c.times(1) - c.times(0);
    const auto deriv = [h](const Eigen::ArrayXcd& f, Index i) {
        return (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2)) / (12.0 * h);
    };
    for (Index i : {Index(101), Index(2001), Index(5555), Index(7777)}) {
        const double t = c.times(i);
        const Complex dD = deriv(c.D, i);
        const Complex dF = deriv(c.F, i);
        const Complex one_plus_d = 1.0 + c.D(i);
        CHECK(std::abs(kI * dD - (p.omega(t) + 4.0 * p.beta(t) * c.E(i)) * one_plus_d) < 1e-6 * p.omega(t));
        CHECK(std::abs(kI * dF - p.beta(t) * one_plus_d * one_plus_d) < 1e-6 * p.omega(t));
    }
}

TEST_CASE("riccati preconditions and blow-up")
{
    CHECK_THROWS_AS(solve_riccati(DrivingProfile::constant(81.0, 1.0), 0.01), InvalidArgument);
    // An inverted oscillator squeezes without bound, |E| -> 1/2.
    CHECK_THROWS_AS(solve_riccati(DrivingProfile::constant(-1.0, 30.0), 1e-3), NumericalError);
}

TEST_CASE("hermite functions are orthonormal")
{
    const Grid1D g(-16.0, 16.0, 1024);
    const Eigen::MatrixXd h = hermite_functions(g, 64);
    const Eigen::MatrixXd gram = h * h.transpose() * g.dx();
    CHECK((gram - Eigen::MatrixXd::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("unit driving leaves number-state densities unchanged")
{
    const Grid1D g(-16.0, 16.0, 1024);
    const PropagatorCoeffs c = propagator_coefficients(DrivingProfile::constant(1.0, 2.0), 1e-3);
    for (Index n : {0, 3, 10}) {
        const Wavefunction1D psi = number_state(g, n);
        const Wavefunction1D out = apply_propagator(c, 2.0, psi);
        CHECK((out.amp.abs2() - psi.amp.abs2()).abs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("ground state of the undriven oscillator is static")
{
    const Grid1D g(-16.0, 16.0, 1024);
    const double T = 2.0 * kPi / 9.0;
    const PropagatorCoeffs c = propagator_coefficients(DrivingProfile::constant(81.0, T), 2.5e-4);
    const Wavefunction1D ground = make_gaussian_1d(g, 0.0, 1.0 / 9.0, 0.0);
    for (Index i = 0; i < c.size(); i += c.size() / 8) {
        const Wavefunction1D out = apply_propagator(c, c.times(i), ground);
        CHECK((out.amp.abs2() - ground.amp.abs2()).abs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("propagator agrees with the grid for a smooth bump")
{
    const Grid1D g(-16.0, 16.0, 1024);
    const DrivingProfile p{[](double t) { return 81.0 + 10.0 * std::exp(-(t - 1.0) * (t - 1.0)); }, 2.0};
    const PropagatorCoeffs c = propagator_coefficients(p, 2.5e-4);
    for (const NamedState& s : default_states(g)) {
        INFO(s.name);
        const Wavefunction1D fock = apply_propagator(c, 2.0, s.psi);
        EvolutionPlan plan;
        plan.dt = 1e-4;
        plan.n_steps = 20000;
        const Wavefunction1D grid = evolve_1d_parametric(s.psi, p.w, plan).final_state();
        CHECK(std::norm(inner(grid, fock)) >= 0.999);
        CHECK(std::abs(norm(fock) - 1.0) < 1e-6);
    }
}

TEST_CASE("truncation guard")
{
    const Grid1D g(-40.0, 40.0, 2048);
    const PropagatorCoeffs c = propagator_coefficients(DrivingProfile::constant(81.0, 0.1), 2.5e-4);
    // A state this far out needs thousands of unit-frequency quanta.
    const Wavefunction1D far = make_gaussian_1d(g, 25.0, 1.0 / 9.0, 0.0);
    CHECK_THROWS_AS(apply_propagator(c, 0.1, far, 64, 256), NumericalError);
    CHECK_THROWS(c.index_of(0.0333333));
}

TEST_CASE("influence overlap limits")
{
    const Grid1D g(-16.0, 16.0, 1024);
    const ExternalPotential well = SmoothedWell{2.64, 0.5, 0.2};
    const HarmonicInternal u{20.25};
    const Wavefunction1D ground = make_gaussian_1d(g, 0.0, 1.0 / 9.0, 0.0);
    const Wavefunction1D displaced = make_gaussian_1d(g, 0.5, 1.0 / 9.0, 0.0);

    const PathSample through = classical_path(well, -4.0, 1.0, 8.0, 1e-3);
    const PathSample back = classical_path(well, -4.0, 1.0, 8.0, 1e-3, -0.25);

    const InfluenceOverlap same = influence_overlap(displaced, through, through, well, u);
    CHECK(std::abs(same.magnitude - 1.0) < 1e-10);
    CHECK(std::abs(same.functional - 1.0) < 1e-10);

    const ExternalPotential quad = QuadraticExternal{0.3, -0.2, 1.5};
    const InfluenceOverlap q = influence_overlap(displaced, through, back, quad, u);
    CHECK(std::abs(q.magnitude - 1.0) < 1e-8);

    const double g_mag = influence_overlap(ground, through, back, well, u).magnitude;
    const double d_mag = influence_overlap(displaced, through, back, well, u).magnitude;
    CHECK(g_mag <= 1.0 + 1e-8);
    CHECK(d_mag < g_mag);
}

TEST_CASE("classical paths")
{
    const PathSample free = classical_path(QuadraticExternal{0.0, 0.0, 0.0}, -4.0, 1.5, 2.0, 1e-3);
    CHECK(free.Y.size() == 2001);
    CHECK(free.Y.back() == Approx(-1.0).margin(1e-12));
    CHECK(free.at(1.0005) == Approx(-4.0 + 1.5 * 1.0005).margin(1e-12));

    // Energy P^2/2 + 2V(Y) is conserved by velocity-Verlet to O(h^2).
    const ExternalPotential well = SmoothedWell{2.64, 0.5, 0.2};
    const PathSample p = classical_path(well, -4.0, 1.0, 8.0, 1e-4);
    const double vend = (p.Y.back() - p.Y[p.Y.size() - 2]) / p.h;
    CHECK(0.5 * vend * vend + 2.0 * value(well, p.Y.back()) == Approx(0.5 + 2.0 * value(well, -4.0)).epsilon(1e-4));
    CHECK(p.Y.back() > 3.0);

    const PathSample r = classical_path(well, -4.0, 1.0, 8.0, 1e-4, -0.25);
    CHECK(r.Y.back() < -3.0);
    for (double y : r.Y) CHECK(y <= -0.25 + 1e-12);
}
