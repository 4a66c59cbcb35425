#include "decoh/parametric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

namespace decoh {

double PathSample::at(double t) const
{
    if (Y.empty()) throw InvalidArgument("PathSample: empty path");
    if (Y.size() == 1 || t <= 0.0) return Y.front();
    const double s = t / h;
    const auto last = static_cast<double>(Y.size() - 1);
    if (s >= last) return Y.back();
    const auto m = static_cast<std::size_t>(s);
    const double f = s - static_cast<double>(m);
    return (1.0 - f) * Y[m] + f * Y[m + 1];
}

DrivingProfile DrivingProfile::constant(double w0, double horizon)
{
    return {[w0](double) { return w0; }, horizon};
}

DrivingProfile DrivingProfile::along_path(const PathSample& path, const ExternalPotential& v, const HarmonicInternal& u)
{
    validate(u);
    const double four_k = 4.0 * u.k;
    return {[path, v, four_k](double t) { return four_k + 2.0 * second_derivative(v, path.at(t)); }, path.horizon()};
}

Index PropagatorCoeffs::index_of(double t) const
{
    const double h = 0.5 * dt;
    const double s = t / h;
    const double r = std::round(s);
    if (std::abs(s - r) > 1e-6 || r < 0 || r >= static_cast<double>(size())) {
        throw InvalidArgument("PropagatorCoeffs: t = " + std::to_string(t) + " is not on the coefficient lattice");
    }
    return static_cast<Index>(r);
}

namespace {

constexpr double kBlowUp = 0.5 - 1e-6;

Complex riccati_rhs(double omega, double beta, Complex e)
{
    return -kI * (beta + 2.0 * omega * e + 4.0 * beta * e * e);
}

struct RiccatiRun {
    double dt;
    Eigen::ArrayXd times;
    Eigen::ArrayXcd E;
};

// Dense lattice of n_steps*2 + 1 points; even entries are RK4 nodes.
RiccatiRun integrate_riccati(const DrivingProfile& profile, Index n_steps)
{
    const double dt = profile.horizon / static_cast<double>(n_steps);
    RiccatiRun run{dt, Eigen::ArrayXd::LinSpaced(2 * n_steps + 1, 0.0, profile.horizon),
                   Eigen::ArrayXcd::Zero(2 * n_steps + 1)};
    Complex e = 0.0;
    double t = 0.0;
    Complex f0 = riccati_rhs(profile.omega(t), profile.beta(t), e);
    for (Index n = 0; n < n_steps; ++n) {
        const double tm = t + 0.5 * dt;
        const double t1 = t + dt;
        const double om = profile.omega(tm), bm = profile.beta(tm);
        const Complex k1 = f0;
        const Complex k2 = riccati_rhs(om, bm, e + 0.5 * dt * k1);
        const Complex k3 = riccati_rhs(om, bm, e + 0.5 * dt * k2);
        const Complex k4 = riccati_rhs(profile.omega(t1), profile.beta(t1), e + dt * k3);
        const Complex e1 = e + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(e1.real()) || !std::isfinite(e1.imag()) || std::abs(e1) >= kBlowUp) {
            throw NumericalError("Riccati solution reached |E| = " + std::to_string(std::abs(e1)) + " at t = " +
                                 std::to_string(t1) + "; the normal-ordered form is singular there");
        }
        const Complex f1 = riccati_rhs(profile.omega(t1), profile.beta(t1), e1);
        run.E(2 * n + 1) = 0.5 * (e + e1) + dt / 8.0 * (f0 - f1);
        run.E(2 * n + 2) = e1;
        e = e1;
        f0 = f1;
        t = t1;
    }
    return run;
}

// Cumulative integral on a uniform lattice of spacing h with an odd number of
// points: Simpson across node pairs, (5, 8, -1) h/12 to the midpoints.
template <class Array>
Array cumulative_integral(const Array& g, double h)
{
    const Index m = g.size();
    Array out = Array::Zero(m);
    for (Index j = 0; j + 2 < m; j += 2) {
        out(j + 1) = out(j) + h / 12.0 * (5.0 * g(j) + 8.0 * g(j + 1) - g(j + 2));
        out(j + 2) = out(j) + h / 3.0 * (g(j) + 4.0 * g(j + 1) + g(j + 2));
    }
    return out;
}

} // namespace

PropagatorCoeffs solve_riccati(const DrivingProfile& profile, double dt, bool richardson)
{
    if (!profile.w) throw InvalidArgument("solve_riccati: driving profile has no w(t)");
    if (!(profile.horizon > 0.0)) throw InvalidArgument("solve_riccati: horizon must be positive");
    if (!(dt > 0.0)) throw InvalidArgument("solve_riccati: dt must be positive");
    const auto n_steps = static_cast<Index>(std::ceil(profile.horizon / dt - 1e-9));
    const double step = profile.horizon / static_cast<double>(n_steps);

    double max_omega = 0.0;
    for (Index j = 0; j <= 2 * n_steps; ++j) {
        max_omega = std::max(max_omega, std::abs(profile.omega(0.5 * step * static_cast<double>(j))));
    }
    if (step * max_omega > 0.05) {
        throw InvalidArgument("solve_riccati: dt * max|Omega| = " + std::to_string(step * max_omega) +
                              " exceeds 0.05; reduce dt");
    }

    RiccatiRun run = integrate_riccati(profile, n_steps);
    PropagatorCoeffs c;
    c.dt = run.dt;
    c.times = std::move(run.times);
    c.E = std::move(run.E);
    if (richardson) {
        const RiccatiRun fine = integrate_riccati(profile, 2 * n_steps);
        double err = 0.0;
        for (Index n = 0; n <= n_steps; ++n) err = std::max(err, std::abs(c.E(2 * n) - fine.E(4 * n)));
        c.riccati_error = err / 15.0;
    }
    return c;
}

PropagatorCoeffs integrate_ADF(PropagatorCoeffs c, const DrivingProfile& profile)
{
    const Index m = c.size();
    if (m < 3 || m % 2 == 0 || c.E.size() != m) {
        throw InvalidArgument("integrate_ADF: E must be tabulated on an odd dense lattice");
    }
    const double h = 0.5 * c.dt;
    Eigen::ArrayXd omega(m), beta(m);
    for (Index j = 0; j < m; ++j) {
        omega(j) = profile.omega(c.times(j));
        beta(j) = profile.beta(c.times(j));
    }
    const Eigen::ArrayXcd be = beta.cast<Complex>() * c.E;
    c.A = -2.0 * kI * cumulative_integral<Eigen::ArrayXcd>(be, h);
    const Eigen::ArrayXcd lam = cumulative_integral<Eigen::ArrayXcd>(omega.cast<Complex>() + 4.0 * be, h);
    const Eigen::ArrayXcd one_plus_d = (-kI * lam).exp();
    c.D = one_plus_d - 1.0;
    c.F = -kI * cumulative_integral<Eigen::ArrayXcd>(beta.cast<Complex>() * one_plus_d.square(), h);
    c.phase = 0.5 * cumulative_integral<Eigen::ArrayXd>(omega, h);
    return c;
}

PropagatorCoeffs propagator_coefficients(const DrivingProfile& profile, double dt)
{
    return integrate_ADF(solve_riccati(profile, dt), profile);
}

Eigen::MatrixXd hermite_functions(const Grid1D& grid, Index count)
{
    if (count < 1) throw InvalidArgument("hermite_functions: count must be positive");
    const Index n = grid.size();
    Eigen::MatrixXd h(count, n);
    const double norm0 = std::pow(kPi, -0.25);
    for (Index j = 0; j < n; ++j) {
        const double x = grid.x(j);
        h(0, j) = norm0 * std::exp(-0.5 * x * x);
        if (count > 1) h(1, j) = std::sqrt(2.0) * x * h(0, j);
        for (Index k = 2; k < count; ++k) {
            const auto kd = static_cast<double>(k);
            h(k, j) = std::sqrt(2.0 / kd) * x * h(k - 1, j) - std::sqrt((kd - 1.0) / kd) * h(k - 2, j);
        }
    }
    return h;
}

namespace {

// The normal-ordered factors cancel heavily against each other in the number
// basis (|E| near 1/2 costs ~14 digits), so they are applied in 50-digit arithmetic.
using Wide = boost::multiprecision::cpp_bin_float_50;
using WideComplex = boost::multiprecision::cpp_complex_50;
using WideVector = std::vector<WideComplex>;

WideComplex widen(Complex z) { return {Wide(z.real()), Wide(z.imag())}; }

// exp(z a^2) c, exact on the span of c.
WideVector exp_lowering(const WideVector& c, const WideComplex& z)
{
    const std::size_t n = c.size();
    WideVector out = c, term = c;
    for (std::size_t m = 1; 2 * m < n; ++m) {
        WideVector next(n, WideComplex(0));
        for (std::size_t k = 2; k < n; ++k) {
            next[k - 2] = term[k] * (z * sqrt(Wide(k * (k - 1))) / Wide(m));
        }
        term.swap(next);
        for (std::size_t k = 0; k < n; ++k) out[k] += term[k];
    }
    return out;
}

// The first `dim` number-state components of exp(z a+^2) c. The m-th series
// term is supported on [2m, 2m + dim(c)), so each component is a finite sum.
WideVector exp_raising(const WideVector& c, const WideComplex& z, std::size_t dim)
{
    const std::size_t n = c.size();
    WideVector out(dim, WideComplex(0));
    WideVector term = c;
    for (std::size_t m = 0; 2 * m < dim; ++m) {
        if (m > 0) {
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t k = 2 * m + i; // target index of term[i]
                term[i] *= z * sqrt(Wide((k - 1) * k)) / Wide(m);
            }
        }
        for (std::size_t i = 0; i < n && 2 * m + i < dim; ++i) out[2 * m + i] += term[i];
    }
    return out;
}

} // namespace

Wavefunction1D apply_propagator(const PropagatorCoeffs& coeffs, double t, const Wavefunction1D& psi, Index n_fock,
                                Index max_fock)
{
    if (n_fock < 2 || max_fock < n_fock) throw InvalidArgument("apply_propagator: need 2 <= n_fock <= max_fock");
    if (coeffs.A.size() != coeffs.size() || coeffs.F.size() != coeffs.size()) {
        throw InvalidArgument("apply_propagator: coefficients lack A, D, F; run integrate_ADF");
    }
    const Index j = coeffs.index_of(t);
    const Grid1D& g = psi.grid;
    const double in_norm2 = norm_squared(psi);
    if (!(in_norm2 > 0.0)) throw InvalidArgument("apply_propagator: zero state");

    Index nf = n_fock;
    Eigen::VectorXcd c;
    for (;;) {
        c = (hermite_functions(g, nf).cast<Complex>() * psi.amp.matrix()) * g.dx();
        const double lost = 1.0 - c.squaredNorm() / in_norm2;
        if (lost < 1e-8) break;
        if (2 * nf > max_fock) {
            throw NumericalError("apply_propagator: " + std::to_string(max_fock) +
                                 " number states miss a fraction " + std::to_string(lost) +
                                 " of the input; raise n_fock");
        }
        nf *= 2;
    }

    WideVector v(static_cast<std::size_t>(nf));
    for (Index k = 0; k < nf; ++k) v[static_cast<std::size_t>(k)] = widen(c(k));
    v = exp_lowering(v, widen(coeffs.F(j)));
    const WideComplex ratio = widen(1.0 + coeffs.D(j));
    WideComplex scale(1);
    for (auto& x : v) {
        x *= scale;
        scale *= ratio;
    }

    // Output support grows with the squeeze: evaluate up to the cap, then keep
    // the smallest power-of-two prefix beyond which less than 1e-10 remains.
    const double prefactor = std::norm(std::exp(coeffs.A(j)));
    const auto cap = static_cast<std::size_t>(4 * max_fock);
    const WideVector w = exp_raising(v, widen(coeffs.E(j)), cap);
    std::vector<double> tail(cap + 1, 0.0);
    for (std::size_t k = cap; k-- > 0;) tail[k] = tail[k + 1] + static_cast<double>(norm(w[k]));
    std::size_t dim = static_cast<std::size_t>(2 * nf);
    while (dim < cap && tail[dim] * prefactor >= 1e-10 * in_norm2) dim *= 2;
    if (tail[cap / 2] * prefactor >= 1e-10 * in_norm2) {
        throw NumericalError("apply_propagator: output needs more than " + std::to_string(cap) +
                             " number states (|E| = " + std::to_string(std::abs(coeffs.E(j))) + ")");
    }

    Eigen::VectorXcd out_c(static_cast<Index>(dim));
    for (std::size_t k = 0; k < dim; ++k) {
        out_c(static_cast<Index>(k)) = Complex(static_cast<double>(w[k].real()), static_cast<double>(w[k].imag()));
    }
    out_c *= std::exp(coeffs.A(j) - kI * coeffs.phase(j));
    Eigen::ArrayXcd out = (hermite_functions(g, static_cast<Index>(dim)).transpose().cast<Complex>() * out_c).array();
    return {g, std::move(out)};
}

InfluencePropagators influence_propagators(const PathSample& path_a, const PathSample& path_b,
                                           const ExternalPotential& v, const HarmonicInternal& u, double dt)
{
    if (std::abs(path_a.horizon() - path_b.horizon()) > 1e-9 * std::max(1.0, path_a.horizon())) {
        throw InvalidArgument("influence_overlap: paths must share a horizon");
    }
    return {propagator_coefficients(DrivingProfile::along_path(path_a, v, u), dt),
            propagator_coefficients(DrivingProfile::along_path(path_b, v, u), dt)};
}

InfluenceOverlap influence_overlap(const Wavefunction1D& psi_i, const PathSample& path_a, const PathSample& path_b,
                                   const ExternalPotential& v, const HarmonicInternal& u,
                                   const InfluenceOptions& options)
{
    const InfluencePropagators props = influence_propagators(path_a, path_b, v, u, options.dt);
    const double T = props.a.times(props.a.size() - 1);
    const Wavefunction1D psi_a = apply_propagator(props.a, T, psi_i, options.n_fock);
    const Wavefunction1D psi_b = apply_propagator(props.b, T, psi_i, options.n_fock);
    // U is unitary; dividing out the propagated norms removes the common
    // truncation loss (~1e-10) that would otherwise bias |overlap| below 1.
    // A larger loss means the lattice clips the propagated states.
    const double na = norm(psi_a), nb = norm(psi_b), n0 = norm(psi_i);
    if (std::abs(na - n0) > 1e-6 * n0 || std::abs(nb - n0) > 1e-6 * n0) {
        throw NumericalError("influence_overlap: propagated norms " + std::to_string(na) + ", " + std::to_string(nb) +
                             " drift from " + std::to_string(n0) + "; widen the internal lattice");
    }
    const Complex ov = inner(psi_a, psi_b) / (na * nb);

    const Index m = props.a.size();
    Eigen::ArrayXd dv(m);
    for (Index j = 0; j < m; ++j) {
        const double t = props.a.times(j);
        dv(j) = value(v, path_a.at(t)) - value(v, path_b.at(t));
    }
    const double phi = cumulative_integral<Eigen::ArrayXd>(dv, 0.5 * props.a.dt)(m - 1);
    return {std::exp(-2.0 * kI * phi) * ov, ov, std::abs(ov)};
}

PathSample classical_path(const ExternalPotential& v, double Y0, double P0, double horizon, double h,
                          std::optional<double> reflect_at)
{
    if (!(h > 0.0) || !(horizon > 0.0)) throw InvalidArgument("classical_path: h and horizon must be positive");
    validate(v);
    const auto n = static_cast<std::size_t>(std::llround(horizon / h));
    if (n == 0 || std::abs(static_cast<double>(n) * h - horizon) > 1e-9 * horizon) {
        throw InvalidArgument("classical_path: h must divide the horizon");
    }
    auto force = [&v](double y) { return -2.0 * first_derivative(v, y); };
    PathSample path{h, {}};
    path.Y.reserve(n + 1);
    double y = Y0, p = P0, a = force(y);
    bool reflected = !reflect_at.has_value();
    path.Y.push_back(y);
    for (std::size_t m = 0; m < n; ++m) {
        p += 0.5 * h * a;
        const double y_new = y + h * p;
        if (!reflected && (y - *reflect_at) * (y_new - *reflect_at) <= 0.0 && y_new != y) {
            y = 2.0 * *reflect_at - y_new;
            p = -p;
            reflected = true;
        } else {
            y = y_new;
        }
        a = force(y);
        p += 0.5 * h * a;
        path.Y.push_back(y);
    }
    return path;
}

} // namespace decoh
