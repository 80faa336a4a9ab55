#pragma once

#include <array>
#include <string>
#include <vector>

#include "vesicle/model.hpp"
#include "vesicle/schemes.hpp"

namespace vesicle {

/** Quadratic-form initial profile: tanh((R - sum_i (x_i-c_i)^2/d_i) / (sqrt(2) eps)). */
struct EllipsoidSpec {
    std::array<double, 3> center{0.5, 0.5, 0.5};
    std::array<double, 3> divisors{1.0, 1.0, 1.0};  // divide the squared offsets, used as printed
    double R = 0.5;   // offset the quadratic form is subtracted from
    double epsilon = 0.04;

    void validate(const GridSpec& g) const {
        for (double d : divisors)
            if (!(d > 0)) throw std::invalid_argument("EllipsoidSpec: divisors must be > 0");
        if (!(R > 0)) throw std::invalid_argument("EllipsoidSpec: R must be > 0");
        if (!(epsilon > 0)) throw std::invalid_argument("EllipsoidSpec: epsilon must be > 0");
        const double lo[3] = {0, 0, 0}, hi[3] = {g.lx, g.ly, g.lz};
        for (int a = 0; a < 3; ++a)
            if (center[a] < lo[a] || center[a] > hi[a])
                throw std::invalid_argument("EllipsoidSpec: center outside the box");
    }
};

template <typename Real = double>
ScalarField3D<Real> tanh_ellipsoid(const EllipsoidSpec& spec, const GridSpec& g) {
    spec.validate(g);
    ScalarField3D<Real> out(g);
    const double hx = g.lx / g.nx, hy = g.ly / g.ny, hz = g.lz / g.nz;
    const double s2e = std::sqrt(2.0) * spec.epsilon;
    for (int k = 0; k < g.nz; ++k) {
        double dz = k * hz - spec.center[2];
        for (int j = 0; j < g.ny; ++j) {
            double dy = j * hy - spec.center[1];
            for (int i = 0; i < g.nx; ++i) {
                double dx = i * hx - spec.center[0];
                double q = dx * dx / spec.divisors[0] + dy * dy / spec.divisors[1] +
                           dz * dz / spec.divisors[2];
                out.values[out.index(i, j, k)] = Real(std::tanh((spec.R - q) / s2e));
            }
        }
    }
    return out;
}

/**
 * Signed-distance sphere profile tanh((r - |x-c|) / (sqrt(2) eps)), periodic
 * minimum-image distance. Unlike the quadratic-form profile this has the
 * canonical interface width in distance units at every radius, so the
 * phase-field functionals converge to the sharp-interface sphere values.
 */
template <typename Real = double>
ScalarField3D<Real> tanh_sphere(const std::array<double, 3>& center, double r, double eps,
                                const GridSpec& g) {
    if (!(r > 0) || !(eps > 0)) throw std::invalid_argument("tanh_sphere: r, eps > 0");
    ScalarField3D<Real> out(g);
    const double hx = g.lx / g.nx, hy = g.ly / g.ny, hz = g.lz / g.nz;
    const double s2e = std::sqrt(2.0) * eps;
    auto wrap = [](double d, double L) {
        d = std::fmod(d, L);
        if (d > L / 2) d -= L;
        if (d < -L / 2) d += L;
        return d;
    };
    for (int k = 0; k < g.nz; ++k) {
        double dz = wrap(k * hz - center[2], g.lz);
        for (int j = 0; j < g.ny; ++j) {
            double dy = wrap(j * hy - center[1], g.ly);
            for (int i = 0; i < g.nx; ++i) {
                double dx = wrap(i * hx - center[0], g.lx);
                double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
                out.values[out.index(i, j, k)] = Real(std::tanh((r - dist) / s2e));
            }
        }
    }
    return out;
}

/** Constraint targets measured from an initial configuration. */
struct Constraints {
    double alpha = 0, beta = 0, dA0 = 0;
};

/**
 * alpha = V(phi0), beta = A(phi0), dA0 = dA(phi0): the natural targets for a
 * run that should preserve the initial volume/area, with the area-difference
 * target free to be retuned afterwards.
 */
template <typename Real>
Constraints derive_constraints(const ScalarField3D<Real>& phi0, const ModelParams& pin) {
    ModelParams p = pin.resolved();
    Constraints c;
    c.alpha = volume_V(phi0);
    c.beta = gl_B_and_area_A(phi0, p).second;
    c.dA0 = area_difference_dA(phi0, p);
    return c;
}

/** Which catalog targets are known NOT to equal derive_constraints(init). */
struct VariedFlags {
    bool alpha = false, beta = false, dA0 = false;
};

struct ExperimentPreset {
    std::string name;
    GridSpec domain;
    ModelParams params;
    EllipsoidSpec init;
    IntegratorConfig integrator;
    std::string expected_shape;
    VariedFlags varied;
    std::string notes;
};

namespace detail {

inline std::vector<ExperimentPreset> build_catalog() {
    std::vector<ExperimentPreset> cat;
    const double sq35 = 0.35 * 0.35, sq20 = 0.20 * 0.20, sq15 = 0.15 * 0.15;

    auto mk = [&](const char* name, GridSpec dom, double eps, double dt, double M1, double M2,
                  double alpha, double beta, double dA0, EllipsoidSpec init, const char* shape,
                  VariedFlags varied, const char* notes) {
        ExperimentPreset pr;
        pr.name = name;
        pr.domain = dom;
        pr.params.epsilon = eps;
        pr.params.M1 = M1;
        pr.params.M2 = M2;
        pr.params.alpha = alpha;
        pr.params.beta = beta;
        pr.params.dA0 = dA0;
        init.epsilon = eps;
        pr.init = init;
        pr.integrator.scheme = Scheme::semi_implicit;
        pr.integrator.dt = dt;
        pr.expected_shape = shape;
        pr.varied = varied;
        pr.notes = notes;
        cat.push_back(std::move(pr));
    };

    GridSpec unit = cube_grid(64);
    EllipsoidSpec flat1{{0.5, 0.5, 0.5}, {0.5, 0.5, 0.1}, 0.35, 0};
    EllipsoidSpec ball{{0.5, 0.5, 0.5}, {sq35, sq35, sq35}, 0.6, 0};
    EllipsoidSpec flat3{{0.5, 0.5, 0.5}, {sq20, sq20, sq35}, 0.5, 0};

    // Catalog targets are stored verbatim as printed. Where a target is not
    // the measured derive_constraints(init) value under the literal profile
    // formula, it is flagged varied and the measured value is quoted in the
    // notes (64^3 grids; measured at the preset's own resolution).
    mk("discocyte", unit, 0.04, 5e-7, 1e5, 1e4, 0.0289, 0.4880, 0.1090, flat1, "discocyte",
       {true, true, true},
       "printed targets are retuned, not measured from the literal profile, which "
       "gives (0.1382, 2.2191, 0.2286) at 64^3");
    mk("torus", unit, 0.03, 2e-7, 1e5, 1e4, 0.0652, 0.9092, 0.2839, ball, "torus",
       {true, true, true},
       "literal profile measures (0.0836, 2.1346, 0.1121) at 64^3");

    auto table1 = [&](const char* name, double beta, double dA0, const char* shape,
                      const char* notes) {
        mk(name, unit, 0.05, 5e-7, 1e5, 1e4, 0.0077, beta, dA0, flat3, shape,
           {true, true, true}, notes);
    };
    const char* t1notes =
        "shape-transition family: beta/dA0 swept across rows; the literal profile "
        "measures (0.0209, 1.2327, 0.1110) at 64^3";
    table1("biconcave", 0.1992, 0.1614, "biconcave", t1notes);
    table1("early_gourd", 0.2068, 0.1676, "early_gourd", t1notes);
    table1("elongated_gourd", 0.2390, 0.1906, "elongated_gourd", t1notes);
    table1("gourd", 0.2390, 0.2253, "gourd", t1notes);
    table1("cylinder", 0.2390, 0.2426, "cylinder", t1notes);

    mk("two_sphere", unit, 0.02, 2e-7, 1e5, 1e4, 0.0074, 0.1969, 0.0711, flat3, "two_sphere",
       {true, true, true},
       "source text says the configuration follows the flattened-ellipsoid family; "
       "whether that includes the profile is ambiguous, the catalog reuses it; literal "
       "profile measures (0.0207, 1.0737, 0.0279) at 64^3");
    mk("chain", unit, 0.02, 5e-7, 1e5, 1e4, 0.0074, 0.2328, 0.0958, flat3, "chain",
       {true, true, true}, "literal profile measures (0.0207, 1.0737, 0.0279) at 64^3");
    EllipsoidSpec ball_half{{0.5, 0.5, 0.5}, {sq35, sq35, sq35}, 0.5, 0};
    mk("three_armed", unit, 0.02, 1e-7, 1e5, 1e4, 0.0226, 0.4489, 0.1520, ball_half,
       "three_armed", {true, true, true},
       "literal profile measures (0.0636, 1.6115, 0.0648) at 64^3");
    EllipsoidSpec four{{0.5, 0.5, 0.5}, {sq35, sq35, sq15}, 0.5, 0};
    mk("four_armed", unit, 0.02, 2e-7, 1e5, 1e4, 0.0097, 0.2550, 0.1146, four, "four_armed",
       {true, true, true}, "literal profile measures (0.0272, 1.3892, 0.0447) at 64^3");
    mk("six_armed", unit, 0.02, 1e-7, 1e5, 1e4, 0.0529, 0.7911, 0.1766, ball, "six_armed",
       {true, true, true},
       "profile reuses the torus ellipsoid yet alpha differs from that preset's 0.0652; "
       "literal profile measures (0.0835, 2.0634, 0.0820) at 64^3");
    EllipsoidSpec nested{{1.0, 1.0, 1.0}, {0.16, 0.16, 0.16}, 1.0, 0};
    mk("nested", GridSpec{100, 100, 100, 2.0, 2.0, 2.0}, 0.03, 5e-7, 1e4, 1e4, 0.2693, 2.8347,
       0.3939, nested, "nested", {false, true, true},
       "literal profile measures (0.2682, 5.0431, 0.1227) at 100^3; alpha matches "
       "within 0.5%, beta/dA0 do not");

    return cat;
}

inline const std::vector<ExperimentPreset>& catalog() {
    static const std::vector<ExperimentPreset> cat = build_catalog();
    return cat;
}

} // namespace detail

inline std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& p : detail::catalog()) out.push_back(p.name);
    return out;
}

inline const ExperimentPreset& preset(const std::string& name) {
    for (const auto& p : detail::catalog())
        if (p.name == name) return p;
    throw UnknownPreset("unknown preset: " + name + " (see `presets` for the catalog)");
}

} // namespace vesicle
