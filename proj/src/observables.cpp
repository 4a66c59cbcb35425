#include "decoh/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "decoh/evolve.hpp"
#include "decoh/spectral.hpp"

namespace decoh {

ReducedDensityMatrix partial_trace_internal(const Wavefunction2D& psi)
{
    const auto& m = psi.amp.matrix();
    const double w = psi.grid_Y.dx() * psi.grid_y.dx();
    return {(m.transpose() * m.conjugate()) * w};
}

double impurity(const ReducedDensityMatrix& rho)
{
    return 1.0 - rho.rho.cwiseAbs2().sum();
}

namespace {

// Ascending order p_k = (k - n/2) dp: k < n/2 is negative, including the Nyquist bin k = 0.
// Ascending lattice: index 0 is the Nyquist bin, n/2 is p = 0. Both are
// their own mirror images and are split evenly between the hemispheres.
double negative_fraction(const Eigen::ArrayXd& density_by_p, Index n)
{
    const double neg = density_by_p.segment(1, n / 2 - 1).sum() + 0.5 * (density_by_p(0) + density_by_p(n / 2));
    return neg / density_by_p.sum();
}

} // namespace

LeftwardProbability leftward_probability(const Wavefunction2D& psi)
{
    const Wavefunction2D phi = to_momentum(psi, Axis::com);
    const Eigen::ArrayXd by_p = phi.amp.abs2().rowwise().sum();
    const double p = negative_fraction(by_p, psi.grid_Y.size());
    return {p, central_probability(psi, 5.0) > 1e-4};
}

double leftward_probability(const Wavefunction1D& psi)
{
    const Wavefunction1D phi = to_momentum(psi);
    return negative_fraction(phi.amp.abs2(), psi.grid.size());
}

ThetaFit fit_theta(double p0, double p_half_pi, double p_pi, const std::function<double(double)>& leftward)
{
    ThetaFit fit{};
    fit.a = 0.5 * (p0 + p_pi);
    fit.z = Complex(0.5 * (p0 - p_pi), fit.a - p_half_pi);
    fit.theta_star = std::abs(fit.z) > 0.0 ? -std::arg(fit.z) : 0.0;
    fit.p_max = fit.a + std::abs(fit.z);
    fit.confirmation = leftward(fit.theta_star);
    if (std::abs(fit.confirmation - fit.p_max) > 1e-4) {
        throw NumericalError("optimize_theta: P(theta*) = " + std::to_string(fit.confirmation) +
                             " disagrees with the fitted maximum " + std::to_string(fit.p_max) +
                             "; P(theta) is not of the form a + Re(z e^{i theta})");
    }
    return fit;
}

ThetaFit optimize_theta(const std::function<double(double)>& leftward)
{
    return fit_theta(leftward(0.0), leftward(0.5 * kPi), leftward(kPi), leftward);
}

namespace {

// G(x) = int_{y_min}^{x} rho for the trigonometric interpolant of rho on the grid.
class DensityCdf {
public:
    explicit DensityCdf(const Wavefunction1D& psi) : grid_(psi.grid)
    {
        const Index n = grid_.size();
        Eigen::ArrayXcd rho = psi.amp.abs2().cast<Complex>();
        FftPlan plan(rho.data(), static_cast<int>(n), 1, 1, static_cast<int>(n), FftPlan::Direction::forward);
        plan.execute(rho.data());
        coeff_ = rho / static_cast<double>(n);
        q_ = grid_.momenta_fft_order();
        coeff_(n / 2) = 0.0; // Nyquist term carries no resolved content
    }

    double operator()(double x) const
    {
        const double lo = grid_.x(0);
        const double hi = lo + grid_.dx() * static_cast<double>(grid_.size());
        x = std::clamp(x, lo, hi);
        const double u = x - lo;
        Complex s = coeff_(0) * u;
        for (Index k = 1; k < coeff_.size(); ++k) {
            s += coeff_(k) * (std::exp(kI * q_(k) * u) - 1.0) / (kI * q_(k));
        }
        return s.real();
    }

private:
    Grid1D grid_;
    Eigen::ArrayXcd coeff_;
    Eigen::ArrayXd q_;
};

} // namespace

QProfile q_profile(const ExternalPotential& v, const Wavefunction1D& psi, const Grid1D& grid_Y, QMode mode)
{
    validate(v);
    const Index nY = grid_Y.size();
    const Grid1D& gy = psi.grid;
    const double n2 = norm_squared(psi);
    if (!(n2 > 0.0)) throw InvalidArgument("q_profile: zero internal state");
    QProfile out{grid_Y, Eigen::ArrayXd::Zero(nY), mode};

    if (mode == QMode::taylor) {
        if (std::holds_alternative<SquareWell>(v)) {
            throw InvalidArgument("q_profile: taylor mode needs V'', which is distributional for a square well");
        }
        Eigen::ArrayXd y2(gy.size());
        for (Index j = 0; j < gy.size(); ++j) y2(j) = gy.x(j) * gy.x(j);
        const double mean_y2 = (psi.amp.abs2() * y2).sum() * gy.dx() / n2;
        for (Index i = 0; i < nY; ++i) out.q(i) = second_derivative(v, grid_Y.x(i)) * mean_y2;
        return out;
    }

    if (const auto* w = std::get_if<SquareWell>(&v)) {
        const Wavefunction1D unit{gy, psi.amp / std::sqrt(n2)};
        const DensityCdf cdf(unit);
        const double half = 0.5 * w->width;
        // Support of |psi|^2 up to 1e-300 keeps distant Y exactly zero.
        const double total = cdf(gy.x(gy.size() - 1) + gy.dx());
        for (Index i = 0; i < nY; ++i) {
            const double Y = grid_Y.x(i);
            const double plus = cdf(half - Y) - cdf(-half - Y);
            const double minus = cdf(Y + half) - cdf(Y - half);
            const double inside = std::abs(Y) <= half ? 1.0 : 0.0;
            double q = -w->depth * (plus + minus - 2.0 * inside * total);
            if (std::abs(Y) > half + std::abs(gy.x(0)) + gy.dx()) q = 0.0;
            out.q(i) = q;
        }
        return out;
    }

    const Eigen::ArrayXd rho = psi.amp.abs2() * (gy.dx() / n2);
    for (Index i = 0; i < nY; ++i) {
        const double Y = grid_Y.x(i);
        const double vY = value(v, Y);
        double s = 0.0;
        for (Index j = 0; j < gy.size(); ++j) {
            const double y = gy.x(j);
            s += rho(j) * ((value(v, Y + y) - vY) + (value(v, Y - y) - vY));
        }
        out.q(i) = s;
    }
    return out;
}

Compositeness compositeness(const QProfile& q, const Wavefunction1D& phi)
{
    if (!(q.grid == phi.grid)) throw InvalidArgument("compositeness: Q and phi must share a grid");
    const Eigen::ArrayXd w = phi.amp.abs2() / phi.amp.abs2().sum();
    const double mean = (w * q.q).sum();
    const double var = (w * (q.q - mean).square()).sum();
    const double m_c = std::sqrt(std::max(var, 0.0));
    return {mean, (w * q.q.square()).sum(), m_c,
            m_c > 0.0 ? 0.5 / m_c : std::numeric_limits<double>::infinity()};
}

} // namespace decoh
