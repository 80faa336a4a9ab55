#pragma once

#include <queue>

#include "vesicle/driver.hpp"
#include "vesicle/scenario.hpp"

namespace vesicle {

/**
 * Central-difference directional derivative (E(phi + d*psi) - E(phi - d*psi)) / (2d).
 * Independent check of variational_derivative: should match
 * integrate(variational_derivative(phi) * psi) to O(d^2).
 */
template <typename Real>
Real fd_directional_derivative(const ScalarField3D<Real>& phi, const ScalarField3D<Real>& psi,
                               const ModelParams& pin, Real delta) {
    if (!(delta > 0)) throw std::invalid_argument("fd_directional_derivative: delta > 0");
    ModelParams p = pin.resolved();
    ScalarField3D<Real> plus(phi.grid), minus(phi.grid);
    for (std::size_t i = 0; i < phi.values.size(); ++i) {
        plus.values[i] = phi.values[i] + delta * psi.values[i];
        minus.values[i] = phi.values[i] - delta * psi.values[i];
    }
    Real ep = Real(total_energy(plus, p).E_M);
    Real em = Real(total_energy(minus, p).E_M);
    return (ep - em) / (2 * delta);
}

/** Sharp-interface sphere values: V, A, and the two-leaflet area difference 2D*integral(H). */
struct SphereReference {
    double V = 0, A = 0, dA = 0;
};

inline SphereReference sphere_reference(double r, const ModelParams& pin) {
    if (!(r > 0)) throw std::invalid_argument("sphere_reference: r > 0");
    ModelParams p = pin.resolved();
    SphereReference s;
    s.V = 4.0 / 3.0 * M_PI * r * r * r;
    s.A = 4.0 * M_PI * r * r;
    s.dA = 8.0 * M_PI * p.D * r;
    return s;
}

/** Two-level energy-law residual E(eta) - E(phi) + (1/dt) * integral((eta-phi)^2). */
template <typename Real>
Real energy_law_residual(const ScalarField3D<Real>& phi, const ScalarField3D<Real>& eta,
                         const ModelParams& pin, Real dt) {
    ModelParams p = pin.resolved();
    Real e0 = Real(total_energy(phi, p).E_M);
    Real e1 = Real(total_energy(eta, p).E_M);
    Real d2 = kahan_sum_n<Real>(phi.values.size(), [&](std::size_t i) {
        Real d = eta.values[i] - phi.values[i];
        return d * d;
    }) * Real(phi.grid.cell_volume());
    return (e1 - e0) + d2 / dt;
}

/** One-sided variant with the 1/(2dt) factor; <= 0 (up to slack) for backward Euler. */
template <typename Real>
Real energy_inequality_lhs(const ScalarField3D<Real>& phi, const ScalarField3D<Real>& eta,
                           const ModelParams& pin, Real dt) {
    ModelParams p = pin.resolved();
    Real e0 = Real(total_energy(phi, p).E_M);
    Real e1 = Real(total_energy(eta, p).E_M);
    Real d2 = kahan_sum_n<Real>(phi.values.size(), [&](std::size_t i) {
        Real d = eta.values[i] - phi.values[i];
        return d * d;
    }) * Real(phi.grid.cell_volume());
    return (e1 - e0) + d2 / (2 * dt);
}

/** One row of a penalty-limit sweep. */
struct PenaltyRow {
    double M = 0;
    double vol_violation = 0;   // |V - alpha| at the steady state
    double area_violation = 0;  // |A - beta|
    long steps = 0;
    bool converged = false;
};

/**
 * Run the same scenario with M1 = M2 = M for each M in m_list and record the
 * final constraint violations. Larger M should tighten both.
 */
inline std::vector<PenaltyRow> penalty_sweep(const Field& phi0, const ModelParams& pin,
                                             const std::vector<double>& m_list,
                                             const IntegratorConfig& icfg,
                                             const StoppingCriterion& stop,
                                             int hook_cadence = 100) {
    std::vector<PenaltyRow> rows;
    for (double M : m_list) {
        ModelParams p = pin.resolved();
        p.M1 = M;
        p.M2 = M;
        RunResult r = run_to_steady_state(phi0, p, icfg, stop, hook_cadence);
        const EnergyBreakdown& e = r.history.back().energy;
        PenaltyRow row;
        row.M = M;
        row.vol_violation = std::abs(e.V - p.alpha);
        row.area_violation = std::abs(e.A - p.beta);
        row.steps = r.steps_taken;
        row.converged = r.converged;
        rows.push_back(row);
    }
    return rows;
}

struct ProbePoint {
    std::string name;
    double x = 0, y = 0, z = 0;
};

struct ProbeValue {
    std::string name;
    double value = 0;
};

struct ShapeProbeResult {
    std::vector<ProbeValue> probes;   // phi at the nearest grid node to each point
    int positive_components = 0;      // 6-connected periodic components of {phi > 0}
    int negative_components = 0;      // same for {phi < 0}
};

/** Center, +/- quarter-box points on each axis through the center, and equatorial mid-radius points. */
inline std::vector<ProbePoint> standard_probes(const GridSpec& g) {
    double cx = g.lx / 2, cy = g.ly / 2, cz = g.lz / 2;
    return {
        {"center", cx, cy, cz},
        {"x+", cx + g.lx / 4, cy, cz}, {"x-", cx - g.lx / 4, cy, cz},
        {"y+", cx, cy + g.ly / 4, cz}, {"y-", cx, cy - g.ly / 4, cz},
        {"z+", cx, cy, cz + g.lz / 4}, {"z-", cx, cy, cz - g.lz / 4},
    };
}

namespace detail {

// Count 6-connected components of mask under periodic wrap (BFS, deterministic order).
inline int periodic_components(const std::vector<char>& mask, const GridSpec& g) {
    const int nx = g.nx, ny = g.ny, nz = g.nz;
    std::vector<char> seen(mask.size(), 0);
    auto idx = [&](int i, int j, int k) { return std::size_t(i) + nx * (std::size_t(j) + std::size_t(ny) * k); };
    int count = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < mask.size(); ++s) {
        if (!mask[s] || seen[s]) continue;
        ++count;
        seen[s] = 1;
        stack.assign(1, s);
        while (!stack.empty()) {
            std::size_t cur = stack.back();
            stack.pop_back();
            int i = int(cur % nx), j = int((cur / nx) % ny), k = int(cur / (std::size_t(nx) * ny));
            const int ni[6] = {(i + 1) % nx, (i + nx - 1) % nx, i, i, i, i};
            const int nj[6] = {j, j, (j + 1) % ny, (j + ny - 1) % ny, j, j};
            const int nk[6] = {k, k, k, k, (k + 1) % nz, (k + nz - 1) % nz};
            for (int d = 0; d < 6; ++d) {
                std::size_t t = idx(ni[d], nj[d], nk[d]);
                if (mask[t] && !seen[t]) {
                    seen[t] = 1;
                    stack.push_back(t);
                }
            }
        }
    }
    return count;
}

} // namespace detail

template <typename Real>
ShapeProbeResult shape_probe(const ScalarField3D<Real>& f, const std::vector<ProbePoint>& pts) {
    const GridSpec& g = f.grid;
    ShapeProbeResult out;
    for (const auto& p : pts) {
        auto node = [](double x, double L, int n) {
            long i = std::lround(x / L * n);
            i %= n;
            if (i < 0) i += n;
            return int(i);
        };
        int i = node(p.x, g.lx, g.nx), j = node(p.y, g.ly, g.ny), k = node(p.z, g.lz, g.nz);
        out.probes.push_back({p.name, double(f.at(i, j, k))});
    }
    std::vector<char> pos(f.values.size()), neg(f.values.size());
    for (std::size_t s = 0; s < f.values.size(); ++s) {
        pos[s] = f.values[s] > 0;
        neg[s] = f.values[s] < 0;
    }
    out.positive_components = detail::periodic_components(pos, g);
    out.negative_components = detail::periodic_components(neg, g);
    return out;
}

/**
 * Periodic-aware bounding-box aspect of {phi > 0}: extent along z divided by
 * the larger of the x/y extents. Extent per axis = slab count minus the
 * longest circular run of empty slabs, in length units.
 */
template <typename Real>
double positive_phase_aspect_z(const ScalarField3D<Real>& f) {
    const GridSpec& g = f.grid;
    auto extent = [&](int axis) {
        int n = axis == 0 ? g.nx : axis == 1 ? g.ny : g.nz;
        std::vector<char> occ(n, 0);
        for (int k = 0; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    if (f.at(i, j, k) > 0) occ[axis == 0 ? i : axis == 1 ? j : k] = 1;
        int total = 0;
        for (char c : occ) total += c;
        if (total == 0) return 0.0;
        if (total == n) return axis == 0 ? g.lx : axis == 1 ? g.ly : g.lz;
        // longest circular gap of empty slabs
        int best = 0, cur = 0;
        for (int rep = 0; rep < 2 * n; ++rep) {
            if (!occ[rep % n]) {
                ++cur;
                best = std::max(best, std::min(cur, n));
            } else {
                cur = 0;
            }
        }
        double h = (axis == 0 ? g.lx / g.nx : axis == 1 ? g.ly / g.ny : g.lz / g.nz);
        return (n - best) * h;
    };
    double ex = extent(0), ey = extent(1), ez = extent(2);
    double planar = std::max(ex, ey);
    if (planar == 0) return 0.0;
    return ez / planar;
}

} // namespace vesicle
