#pragma once

#include <fftw3.h>

#include "decoh/grid.hpp"

namespace decoh {

/// Owning wrapper around an in-place complex FFTW plan.
///
/// Plans are made with FFTW_ESTIMATE so that the chosen algorithm, and with it
/// every rounding, is reproducible from run to run. Planning is serialized
/// through a process-wide mutex; execution is thread-safe. execute() may be
/// handed any buffer of the planned shape with the same SIMD alignment as the
/// planning buffer.
class FftPlan {
public:
    enum class Direction { forward, backward };

    /// `howmany` transforms of length n, element j of transform b at data[b*dist + j*stride].
    FftPlan(Complex* buffer, int n, int howmany, int stride, int dist, Direction dir);
    /// Two-dimensional transform of a row-major n0 x n1 array.
    FftPlan(Complex* buffer, int n0, int n1, Direction dir);

    FftPlan(FftPlan&& other) noexcept;
    FftPlan& operator=(FftPlan&& other) noexcept;
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    ~FftPlan();

    void execute(Complex* data) const;

private:
    fftw_plan plan_ = nullptr;
    int alignment_ = 0;
};

enum class Axis { com, internal };

/// Unitary transform to the momentum lattice: phi(p) = dx/sqrt(2 pi) sum_j psi_j e^{-i p x_j},
/// returned on grid.momentum_grid() (ascending momenta). Parseval holds exactly.
Wavefunction1D to_momentum(const Wavefunction1D& psi);
/// Inverse of to_momentum; `position_grid` is the grid the state came from.
Wavefunction1D from_momentum(const Wavefunction1D& phi, const Grid1D& position_grid);

/// Transform of a joint state along one axis; the other axis is untouched.
Wavefunction2D to_momentum(const Wavefunction2D& psi, Axis axis);
Wavefunction2D from_momentum(const Wavefunction2D& phi, Axis axis, const Grid1D& position_grid);

} // namespace decoh
