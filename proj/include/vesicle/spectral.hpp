#pragma once

#include <array>
#include <complex>
#include <sstream>

#include "vesicle/errors.hpp"
#include "vesicle/fft.hpp"
#include "vesicle/grid.hpp"

namespace vesicle {

/** Per-mode wavenumber axes (kx, ky, kz), signed-alias convention. */
template <typename Real = double>
inline std::array<std::vector<Real>, 3> wavenumber_grids(const GridSpec& g) {
    g.validate();
    return {FftContext<Real>::axis_wavenumbers(g.nx, g.lx),
            FftContext<Real>::axis_wavenumbers(g.ny, g.ly),
            FftContext<Real>::axis_wavenumbers(g.nz, g.lz)};
}

namespace detail {

// Multiply each mode by a function of k^2 and transform back.
template <typename Real, typename Fk2>
ScalarField3D<Real> apply_isotropic_multiplier(const ScalarField3D<Real>& f, Fk2&& mult) {
    auto& ctx = fft_context<Real>(f.grid);
    std::vector<std::complex<Real>> spec;
    ctx.forward(f.values, spec);
    ctx.for_each_mode([&](std::size_t idx, Real kx, Real ky, Real kz, Real) {
        spec[idx] *= mult(kx * kx + ky * ky + kz * kz);
    });
    ScalarField3D<Real> out(f.grid);
    ctx.inverse(spec, out.values);
    return out;
}

} // namespace detail

/** Spectral Laplacian: each mode scaled by -k^2. */
template <typename Real>
ScalarField3D<Real> laplacian(const ScalarField3D<Real>& f) {
    return detail::apply_isotropic_multiplier(f, [](Real k2) { return -k2; });
}

/** Spectral biharmonic: each mode scaled by +k^4. */
template <typename Real>
ScalarField3D<Real> biharmonic(const ScalarField3D<Real>& f) {
    return detail::apply_isotropic_multiplier(f, [](Real k2) { return k2 * k2; });
}

/**
 * Pointwise |grad f|^2 with spectral partial derivatives (ik multiplier per
 * axis). The Nyquist column of a first derivative is zeroed: with an even
 * sample count that mode's derivative has no real representative, and
 * dropping it keeps d/dx skew-symmetric on the grid.
 */
template <typename Real>
ScalarField3D<Real> grad_sq(const ScalarField3D<Real>& f) {
    auto& ctx = fft_context<Real>(f.grid);
    std::vector<std::complex<Real>> spec, work;
    ctx.forward(f.values, spec);
    ScalarField3D<Real> out(f.grid);
    std::vector<Real> part;
    const GridSpec& g = f.grid;
    for (int axis = 0; axis < 3; ++axis) {
        work = spec;
        const int nyq[3] = {g.nx / 2, g.ny / 2, g.nz / 2};
        ctx.for_each_mode([&](std::size_t idx, Real kx, Real ky, Real kz, Real) {
            Real k[3] = {kx, ky, kz};
            // identify the integer mode via the stored axes to zero Nyquist
            Real ka = k[axis];
            const auto& ax = (axis == 0) ? ctx.kx() : (axis == 1) ? ctx.ky() : ctx.kz();
            if (ka == ax[nyq[axis]]) ka = 0;
            work[idx] *= std::complex<Real>(0, ka);
        });
        ctx.inverse(work, part);
        for (std::size_t i = 0; i < part.size(); ++i) out.values[i] += part[i] * part[i];
    }
    return out;
}

/** Trapezoidal quadrature on the torus: sum(values) * cell volume. */
template <typename Real>
Real integrate(const ScalarField3D<Real>& f) {
    Real s = kahan_sum(f.values);
    return s * Real(f.grid.cell_volume());
}

/**
 * Dirichlet energy integral(|grad u|^2) evaluated in Fourier space via
 * Parseval. This form pairs exactly with the spectral Laplacian under
 * integration by parts (including the Nyquist planes), which the discrete
 * energy-law identities rely on.
 */
template <typename Real>
Real dirichlet_energy(const ScalarField3D<Real>& f) {
    auto& ctx = fft_context<Real>(f.grid);
    std::vector<std::complex<Real>> spec;
    ctx.forward(f.values, spec);
    const Real n = Real(f.grid.npts());
    std::vector<Real> terms(spec.size());
    ctx.for_each_mode([&](std::size_t idx, Real kx, Real ky, Real kz, Real w) {
        Real k2 = kx * kx + ky * ky + kz * kz;
        terms[idx] = w * k2 * std::norm(spec[idx]);
    });
    return kahan_sum(terms) / (n * n) * Real(f.grid.volume());
}

/**
 * Solve (a*I + b*Lap + c*Lap^2) u = rhs exactly in Fourier space.
 * The per-mode denominator is a - b*k^2 + c*k^4; if any mode's denominator
 * is <= 0 the solve is rejected with NonPositiveSymbol (time step too large
 * for the positivity condition).
 */
template <typename Real>
ScalarField3D<Real> implicit_solve(const ScalarField3D<Real>& rhs, Real a, Real b, Real c) {
    auto& ctx = fft_context<Real>(rhs.grid);
    std::vector<std::complex<Real>> spec;
    ctx.forward(rhs.values, spec);
    Real min_sym = std::numeric_limits<Real>::max();
    ctx.for_each_mode([&](std::size_t, Real kx, Real ky, Real kz, Real) {
        Real k2 = kx * kx + ky * ky + kz * kz;
        min_sym = std::min(min_sym, a - b * k2 + c * k2 * k2);
    });
    if (!(min_sym > 0)) {
        std::ostringstream msg;
        msg << "implicit_solve: Fourier symbol reaches " << min_sym
            << " (needs > 0); reduce dt";
        throw NonPositiveSymbol(msg.str());
    }
    ctx.for_each_mode([&](std::size_t idx, Real kx, Real ky, Real kz, Real) {
        Real k2 = kx * kx + ky * ky + kz * kz;
        spec[idx] /= (a - b * k2 + c * k2 * k2);
    });
    ScalarField3D<Real> out(rhs.grid);
    ctx.inverse(spec, out.values);
    return out;
}

/** Minimum of the symbol a - b*k^2 + c*k^4 over the grid's actual modes. */
template <typename Real>
Real min_symbol(const GridSpec& g, Real a, Real b, Real c) {
    auto& ctx = fft_context<Real>(g);
    Real min_sym = std::numeric_limits<Real>::max();
    ctx.for_each_mode([&](std::size_t, Real kx, Real ky, Real kz, Real) {
        Real k2 = kx * kx + ky * ky + kz * kz;
        min_sym = std::min(min_sym, a - b * k2 + c * k2 * k2);
    });
    return min_sym;
}

/**
 * Optional 2/3-rule truncation: zero every mode with |alias| > n/3 on any
 * axis. Off by default everywhere; provided for robustness studies of the
 * collocated cubic/quintic products.
 */
template <typename Real>
ScalarField3D<Real> dealias_23(const ScalarField3D<Real>& f) {
    auto& ctx = fft_context<Real>(f.grid);
    std::vector<std::complex<Real>> spec;
    ctx.forward(f.values, spec);
    const GridSpec& g = f.grid;
    const Real cx = Real(2 * M_PI / g.lx) * Real(g.nx) / Real(3);
    const Real cy = Real(2 * M_PI / g.ly) * Real(g.ny) / Real(3);
    const Real cz = Real(2 * M_PI / g.lz) * Real(g.nz) / Real(3);
    ctx.for_each_mode([&](std::size_t idx, Real kx, Real ky, Real kz, Real) {
        if (std::abs(kx) > cx || std::abs(ky) > cy || std::abs(kz) > cz)
            spec[idx] = 0;
    });
    ScalarField3D<Real> out(f.grid);
    ctx.inverse(spec, out.values);
    return out;
}

} // namespace vesicle
