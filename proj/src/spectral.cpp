#include "decoh/spectral.hpp"

#include <cmath>
#include <mutex>
#include <utility>

namespace decoh {

namespace {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

int sign_of(FftPlan::Direction dir) { return dir == FftPlan::Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD; }

} // namespace

FftPlan::FftPlan(Complex* buffer, int n, int howmany, int stride, int dist, Direction dir)
{
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_many_dft(1, &n, howmany, as_fftw(buffer), nullptr, stride, dist,
                               as_fftw(buffer), nullptr, stride, dist, sign_of(dir), FFTW_ESTIMATE);
    alignment_ = fftw_alignment_of(reinterpret_cast<double*>(buffer));
    if (!plan_)
        throw NumericalError("FftPlan: FFTW failed to create a plan");
}

FftPlan::FftPlan(Complex* buffer, int n0, int n1, Direction dir)
{
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_2d(n0, n1, as_fftw(buffer), as_fftw(buffer), sign_of(dir), FFTW_ESTIMATE);
    alignment_ = fftw_alignment_of(reinterpret_cast<double*>(buffer));
    if (!plan_)
        throw NumericalError("FftPlan: FFTW failed to create a plan");
}

FftPlan::FftPlan(FftPlan&& other) noexcept
    : plan_(std::exchange(other.plan_, nullptr)), alignment_(other.alignment_)
{
}

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept
{
    if (this != &other) {
        std::swap(plan_, other.plan_);
        alignment_ = other.alignment_;
    }
    return *this;
}

FftPlan::~FftPlan()
{
    if (plan_) {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
}

void FftPlan::execute(Complex* data) const
{
    if (fftw_alignment_of(reinterpret_cast<double*>(data)) != alignment_)
        throw InvalidArgument("FftPlan::execute: buffer alignment differs from the planning buffer");
    fftw_execute_dft(plan_, as_fftw(data), as_fftw(data));
}

namespace {

// Shifted index: ascending momentum slot k holds FFT bin (k - n/2) mod n.
inline Index fft_bin(Index k, Index n) { return (k + n / 2) % n; }

} // namespace

Wavefunction1D to_momentum(const Wavefunction1D& psi)
{
    const Grid1D& g = psi.grid;
    const Index n = g.size();
    Eigen::ArrayXcd work = psi.amp;
    FftPlan(work.data(), static_cast<int>(n), 1, 1, static_cast<int>(n), FftPlan::Direction::forward)
        .execute(work.data());
    const Grid1D pg = g.momentum_grid();
    const double scale = g.dx() / std::sqrt(2.0 * kPi);
    Eigen::ArrayXcd out(n);
    for (Index k = 0; k < n; ++k)
        out(k) = scale * std::polar(1.0, -pg.x(k) * g.x_min()) * work(fft_bin(k, n));
    return Wavefunction1D(pg, std::move(out));
}

Wavefunction1D from_momentum(const Wavefunction1D& phi, const Grid1D& position_grid)
{
    const Grid1D& g = position_grid;
    const Index n = g.size();
    if (!(phi.grid == g.momentum_grid()))
        throw InvalidArgument("from_momentum: momentum grid does not belong to the position grid");
    Eigen::ArrayXcd work(n);
    for (Index k = 0; k < n; ++k)
        work(fft_bin(k, n)) = std::polar(1.0, phi.grid.x(k) * g.x_min()) * phi.amp(k);
    FftPlan(work.data(), static_cast<int>(n), 1, 1, static_cast<int>(n), FftPlan::Direction::backward)
        .execute(work.data());
    work *= phi.grid.dx() / std::sqrt(2.0 * kPi);
    return Wavefunction1D(g, std::move(work));
}

namespace {

// Transforms along one axis of a column-major (nY x ny) array.
void transform_axis(Eigen::ArrayXXcd& a, Axis axis, FftPlan::Direction dir)
{
    const int nY = static_cast<int>(a.rows());
    const int ny = static_cast<int>(a.cols());
    if (axis == Axis::com)
        FftPlan(a.data(), nY, ny, 1, nY, dir).execute(a.data());
    else
        FftPlan(a.data(), ny, nY, nY, 1, dir).execute(a.data());
}

} // namespace

Wavefunction2D to_momentum(const Wavefunction2D& psi, Axis axis)
{
    const Grid1D& g = axis == Axis::com ? psi.grid_Y : psi.grid_y;
    const Index n = g.size();
    Eigen::ArrayXXcd work = psi.amp;
    transform_axis(work, axis, FftPlan::Direction::forward);
    const Grid1D pg = g.momentum_grid();
    const double scale = g.dx() / std::sqrt(2.0 * kPi);
    Eigen::ArrayXXcd out(work.rows(), work.cols());
    for (Index k = 0; k < n; ++k) {
        const Complex f = scale * std::polar(1.0, -pg.x(k) * g.x_min());
        if (axis == Axis::com)
            out.row(k) = f * work.row(fft_bin(k, n));
        else
            out.col(k) = f * work.col(fft_bin(k, n));
    }
    if (axis == Axis::com)
        return Wavefunction2D(pg, psi.grid_y, std::move(out));
    return Wavefunction2D(psi.grid_Y, pg, std::move(out));
}

Wavefunction2D from_momentum(const Wavefunction2D& phi, Axis axis, const Grid1D& position_grid)
{
    const Grid1D& g = position_grid;
    const Grid1D& pg = axis == Axis::com ? phi.grid_Y : phi.grid_y;
    if (!(pg == g.momentum_grid()))
        throw InvalidArgument("from_momentum: momentum grid does not belong to the position grid");
    const Index n = g.size();
    Eigen::ArrayXXcd work(phi.amp.rows(), phi.amp.cols());
    for (Index k = 0; k < n; ++k) {
        const Complex f = std::polar(1.0, pg.x(k) * g.x_min());
        if (axis == Axis::com)
            work.row(fft_bin(k, n)) = f * phi.amp.row(k);
        else
            work.col(fft_bin(k, n)) = f * phi.amp.col(k);
    }
    transform_axis(work, axis, FftPlan::Direction::backward);
    work *= pg.dx() / std::sqrt(2.0 * kPi);
    if (axis == Axis::com)
        return Wavefunction2D(g, phi.grid_y, std::move(work));
    return Wavefunction2D(phi.grid_Y, g, std::move(work));
}

} // namespace decoh
