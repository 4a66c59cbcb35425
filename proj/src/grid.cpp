#include "decoh/grid.hpp"

#include <cmath>
#include <string>

namespace decoh {

bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

Grid1D::Grid1D(double x_min, double x_max, Index n) : x_min_(x_min), x_max_(x_max), n_(n)
{
    if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max))
        throw InvalidArgument("Grid1D: need finite x_min < x_max");
    if (n < 8 || !is_power_of_two(n))
        throw InvalidArgument("Grid1D: point count must be a power of two >= 8, got " +
                              std::to_string(n));
}

Eigen::ArrayXd Grid1D::points() const
{
    return Eigen::ArrayXd::LinSpaced(n_, 0.0, static_cast<double>(n_ - 1)) * dx() + x_min_;
}

Eigen::ArrayXd Grid1D::momenta_fft_order() const
{
    Eigen::ArrayXd p(n_);
    for (Index k = 0; k < n_; ++k)
        p(k) = static_cast<double>(k < n_ / 2 ? k : k - n_) * dp();
    return p;
}

Grid1D Grid1D::momentum_grid() const { return Grid1D(-p_max(), p_max(), n_); }

Wavefunction1D::Wavefunction1D(Grid1D g, Eigen::ArrayXcd a) : grid(g), amp(std::move(a))
{
    if (amp.size() != grid.size())
        throw InvalidArgument("Wavefunction1D: amplitude count does not match grid");
}

Wavefunction2D::Wavefunction2D(Grid1D gY, Grid1D gy, Eigen::ArrayXXcd a)
    : grid_Y(gY), grid_y(gy), amp(std::move(a))
{
    if (amp.rows() != grid_Y.size() || amp.cols() != grid_y.size())
        throw InvalidArgument("Wavefunction2D: amplitude shape does not match grids");
}

double norm_squared(const Wavefunction1D& psi) { return psi.amp.abs2().sum() * psi.grid.dx(); }

double norm_squared(const Wavefunction2D& psi)
{
    return psi.amp.abs2().sum() * psi.grid_Y.dx() * psi.grid_y.dx();
}

double norm(const Wavefunction1D& psi) { return std::sqrt(norm_squared(psi)); }
double norm(const Wavefunction2D& psi) { return std::sqrt(norm_squared(psi)); }

Complex inner(const Wavefunction1D& a, const Wavefunction1D& b)
{
    if (!(a.grid == b.grid))
        throw InvalidArgument("inner: grid mismatch");
    return (a.amp.conjugate() * b.amp).sum() * a.grid.dx();
}

Complex inner(const Wavefunction2D& a, const Wavefunction2D& b)
{
    if (!(a.grid_Y == b.grid_Y) || !(a.grid_y == b.grid_y))
        throw InvalidArgument("inner: grid mismatch");
    return (a.amp.conjugate() * b.amp).sum() * a.grid_Y.dx() * a.grid_y.dx();
}

Wavefunction1D normalized(Wavefunction1D psi)
{
    const double n = norm(psi);
    if (!(n > 0.0) || !std::isfinite(n))
        throw NumericalError("normalized: state has zero or non-finite norm");
    psi.amp /= n;
    return psi;
}

Wavefunction2D normalized(Wavefunction2D psi)
{
    const double n = norm(psi);
    if (!(n > 0.0) || !std::isfinite(n))
        throw NumericalError("normalized: state has zero or non-finite norm");
    psi.amp /= n;
    return psi;
}

Wavefunction1D make_gaussian_1d(const Grid1D& grid, double center, double width_sq,
                                double momentum, double phase)
{
    if (!(width_sq > 0.0))
        throw InvalidArgument("make_gaussian_1d: width_sq must be positive");
    const Eigen::ArrayXd x = grid.points();
    Eigen::ArrayXcd amp(grid.size());
    for (Index j = 0; j < grid.size(); ++j) {
        const double d = x(j) - center;
        amp(j) = std::exp(Complex(-d * d / (2.0 * width_sq), momentum * x(j) + phase));
    }
    Wavefunction1D psi = normalized(Wavefunction1D(grid, std::move(amp)));
    const double edge = std::max(std::norm(psi.amp(0)), std::norm(psi.amp(grid.size() - 1)));
    if (edge > 1e-12)
        throw InvalidArgument("make_gaussian_1d: packet does not fit the grid (edge density " +
                              std::to_string(edge) + ")");
    return psi;
}

namespace {

constexpr double kCancellation = 1e-12;

} // namespace

Wavefunction1D superpose(const Wavefunction1D& a, const Wavefunction1D& b, double rel_phase)
{
    if (!(a.grid == b.grid))
        throw InvalidArgument("superpose: grid mismatch");
    Eigen::ArrayXcd amp = a.amp + std::polar(1.0, rel_phase) * b.amp;
    Wavefunction1D out(a.grid, std::move(amp));
    const double scale = norm_squared(a) + norm_squared(b);
    if (norm_squared(out) <= kCancellation * scale)
        throw NumericalError("superpose: branches cancel (zero-norm result)");
    return normalized(std::move(out));
}

Wavefunction2D superpose(const Wavefunction2D& a, const Wavefunction2D& b, double rel_phase)
{
    if (!(a.grid_Y == b.grid_Y) || !(a.grid_y == b.grid_y))
        throw InvalidArgument("superpose: grid mismatch");
    Eigen::ArrayXXcd amp = a.amp + std::polar(1.0, rel_phase) * b.amp;
    Wavefunction2D out(a.grid_Y, a.grid_y, std::move(amp));
    const double scale = norm_squared(a) + norm_squared(b);
    if (norm_squared(out) <= kCancellation * scale)
        throw NumericalError("superpose: branches cancel (zero-norm result)");
    return normalized(std::move(out));
}

Wavefunction2D product_state(const Wavefunction1D& com, const Wavefunction1D& internal)
{
    Eigen::ArrayXXcd amp = com.amp.matrix() * internal.amp.matrix().transpose();
    return Wavefunction2D(com.grid, internal.grid, std::move(amp));
}

Wavefunction2D mirror_com(const Wavefunction2D& psi)
{
    if (psi.grid_Y.x_min() != -psi.grid_Y.x_max())
        throw InvalidArgument("mirror_com: center-of-mass grid must be symmetric");
    const Index n = psi.grid_Y.size();
    Eigen::ArrayXXcd amp(n, psi.grid_y.size());
    for (Index j = 0; j < n; ++j)
        amp.row(j) = psi.amp.row((n - j) % n);
    return Wavefunction2D(psi.grid_Y, psi.grid_y, std::move(amp));
}

double edge_probability(const Wavefunction1D& psi, Index band)
{
    const Index n = psi.grid.size();
    band = std::min(band, n / 2);
    const double total = psi.amp.abs2().sum();
    const double edge = psi.amp.head(band).abs2().sum() + psi.amp.tail(band).abs2().sum();
    return edge / total;
}

double edge_probability(const Wavefunction2D& psi, Index band_Y, Index band_y)
{
    const Index nY = psi.grid_Y.size();
    const Index ny = psi.grid_y.size();
    band_Y = std::min(band_Y, nY / 2);
    band_y = std::min(band_y, ny / 2);
    const double total = psi.amp.abs2().sum();
    const double eY = psi.amp.topRows(band_Y).abs2().sum() + psi.amp.bottomRows(band_Y).abs2().sum();
    const double ey = psi.amp.leftCols(band_y).abs2().sum() + psi.amp.rightCols(band_y).abs2().sum();
    return std::max(eY, ey) / total;
}

} // namespace decoh
