#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vesicle {

/** Periodic uniform grid on a box [0,lx) x [0,ly) x [0,lz). */
struct GridSpec {
    int nx = 0, ny = 0, nz = 0;
    double lx = 1.0, ly = 1.0, lz = 1.0;

    std::size_t npts() const {
        return static_cast<std::size_t>(nx) * ny * nz;
    }
    double cell_volume() const { return (lx * ly * lz) / double(npts()); }
    double volume() const { return lx * ly * lz; }

    // Axis counts must be even so the real-to-complex layout has an
    // unambiguous Nyquist plane.
    void validate() const {
        auto check_n = [](int n, const char* name) {
            if (n < 4 || n % 2 != 0)
                throw std::invalid_argument(std::string("GridSpec: ") + name +
                                            " must be even and >= 4");
        };
        check_n(nx, "nx");
        check_n(ny, "ny");
        check_n(nz, "nz");
        if (!(lx > 0) || !(ly > 0) || !(lz > 0))
            throw std::invalid_argument("GridSpec: box lengths must be positive");
    }

    bool operator==(const GridSpec& o) const = default;
};

inline GridSpec cube_grid(int n, double box = 1.0) { return {n, n, n, box, box, box}; }

/**
 * Real scalar field sampled at the grid's collocation points, x-fastest:
 * values[i + nx*(j + ny*k)] is the sample at (i*lx/nx, j*ly/ny, k*lz/nz).
 */
template <typename Real = double>
struct ScalarField3D {
    GridSpec grid;
    std::vector<Real> values;

    ScalarField3D() = default;
    explicit ScalarField3D(const GridSpec& g) : grid(g), values(g.npts(), Real(0)) {
        grid.validate();
    }

    std::size_t index(int i, int j, int k) const {
        return std::size_t(i) + std::size_t(grid.nx) * (std::size_t(j) + std::size_t(grid.ny) * k);
    }
    Real& at(int i, int j, int k) { return values[index(i, j, k)]; }
    Real at(int i, int j, int k) const { return values[index(i, j, k)]; }

    std::size_t size() const { return values.size(); }

    bool all_finite() const {
        for (Real v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

using Field = ScalarField3D<double>;

// Compensated (Kahan) summation: deterministic and accurate enough that
// quadrature error never shows up in the 1e-8 energy-law budget.
template <typename Real>
inline Real kahan_sum(const std::vector<Real>& v) {
    Real s = 0, c = 0;
    for (Real x : v) {
        Real y = x - c;
        Real t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

// Same compensation, element generator form to avoid temporaries.
template <typename Real, typename F>
inline Real kahan_sum_n(std::size_t n, F&& term) {
    Real s = 0, c = 0;
    for (std::size_t i = 0; i < n; ++i) {
        Real y = term(i) - c;
        Real t = s + y;
        c = (t - s) - y;
        s = t;
    }
    return s;
}

template <typename Real>
inline Real linf_diff(const ScalarField3D<Real>& a, const ScalarField3D<Real>& b) {
    Real m = 0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

} // namespace vesicle
