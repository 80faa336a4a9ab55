#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "vesicle/scenario.hpp"
#include "vesicle/spectral.hpp"

using namespace vesicle;
using Catch::Approx;

TEST_CASE("tanh_ellipsoid evaluates the printed profile formula") {
    GridSpec g = cube_grid(64);
    EllipsoidSpec spec;
    spec.center = {0.5, 0.5, 0.5};
    spec.divisors = {1.0, 1.0, 1.0};
    spec.R = 0.0625;  // zero crossing at distance 0.25 from the center on-axis
    spec.epsilon = 0.04;
    Field f = tanh_ellipsoid(spec, g);

    // Center sits well inside: q = 0, tanh(R / (sqrt(2) eps)) = tanh(1.1049...)
    CHECK(f.at(32, 32, 32) == Approx(std::tanh(spec.R / (std::sqrt(2.0) * spec.epsilon)))
                                  .margin(1e-15));
    CHECK(f.at(32, 32, 32) > 0.5);

    // x = 0.75 is a grid node where q = 0.0625 exactly, so the profile is tanh(0) = 0.
    CHECK(f.at(48, 32, 32) == 0.0);
    CHECK(f.at(16, 32, 32) == 0.0);

    // Far corner is deep in the negative phase.
    CHECK(f.at(0, 0, 0) < -0.999);

    double lo = 1.0, hi = -1.0;
    for (double v : f.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo > -1.0);
    CHECK(hi < 1.0);
}

TEST_CASE("tanh_ellipsoid x/y symmetry is exact when divisors match") {
    GridSpec g = cube_grid(32);
    EllipsoidSpec spec;
    spec.center = {0.5, 0.5, 0.5};
    spec.divisors = {0.04, 0.04, 0.1225};
    spec.R = 0.5;
    spec.epsilon = 0.05;
    Field f = tanh_ellipsoid(spec, g);
    // dx^2/d + dy^2/d is evaluated in a fixed order, but swapping (i, j) swaps two
    // addends of an IEEE sum whose third term is unchanged; equality holds bitwise.
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                REQUIRE(f.at(i, j, k) == f.at(j, i, k));
}

TEST_CASE("tanh_ellipsoid validates its spec") {
    GridSpec g = cube_grid(16);
    EllipsoidSpec bad;
    bad.divisors = {1.0, 0.0, 1.0};
    CHECK_THROWS_AS(tanh_ellipsoid(bad, g), std::invalid_argument);
    bad = EllipsoidSpec{};
    bad.R = -0.5;
    CHECK_THROWS_AS(tanh_ellipsoid(bad, g), std::invalid_argument);
    bad = EllipsoidSpec{};
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(tanh_ellipsoid(bad, g), std::invalid_argument);
    bad = EllipsoidSpec{};
    bad.center = {1.5, 0.5, 0.5};
    CHECK_THROWS_AS(tanh_ellipsoid(bad, g), std::invalid_argument);
}

TEST_CASE("tanh_sphere is a signed-distance profile with periodic wrap") {
    GridSpec g = cube_grid(64);
    Field f = tanh_sphere({0.5, 0.5, 0.5}, 0.25, 0.02, g);

    // r = 0.25 crosses zero at the on-axis nodes x = 0.25 and x = 0.75.
    CHECK(f.at(16, 32, 32) == 0.0);
    CHECK(f.at(48, 32, 32) == 0.0);
    CHECK(f.at(32, 32, 32) > 0.999);
    CHECK(f.at(0, 0, 0) < -0.999);

    CHECK_THROWS_AS(tanh_sphere({0.5, 0.5, 0.5}, 0.0, 0.02, g), std::invalid_argument);
    CHECK_THROWS_AS(tanh_sphere({0.5, 0.5, 0.5}, 0.25, 0.0, g), std::invalid_argument);
}

TEST_CASE("tanh_sphere at the origin wraps to the same shape as a centered sphere") {
    GridSpec g = cube_grid(32);
    Field centered = tanh_sphere({0.5, 0.5, 0.5}, 0.2, 0.04, g);
    Field wrapped = tanh_sphere({0.0, 0.0, 0.0}, 0.2, 0.04, g);
    // Translating the center by half the box shifts indices by n/2 with periodic wrap.
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                REQUIRE(wrapped.at(i, j, k) ==
                        centered.at((i + 16) % 32, (j + 16) % 32, (k + 16) % 32));
}

TEST_CASE("derive_constraints matches the closed forms on a uniform field") {
    GridSpec g = cube_grid(16);
    Field one(g);
    for (double& v : one.values) v = 1.0;
    ModelParams p;
    p.epsilon = 0.04;
    p.beta = 1.0;  // resolves A0
    Constraints c = derive_constraints(one, p);
    CHECK(c.alpha == Approx(1.0).margin(1e-13));  // V = integral of (phi+1)/2 = |box|
    CHECK(c.beta == Approx(0.0).margin(1e-13));
    CHECK(c.dA0 == Approx(0.0).margin(1e-13));
}

TEST_CASE("derive_constraints reproduces the frozen sphere volume") {
    GridSpec g = cube_grid(64);
    ModelParams p;
    p.epsilon = 0.02;
    p.beta = 1.0;
    Field f = tanh_sphere({0.5, 0.5, 0.5}, 0.25, 0.02, g);
    Constraints c = derive_constraints(f, p);
    // Frozen radial-quadrature values for the signed-distance sphere, r = 0.25, eps = 0.02.
    CHECK(c.alpha == Approx(0.0675169320633).epsilon(1e-7));
    CHECK(c.beta == Approx(0.7886399556).epsilon(1e-6));
    CHECK(c.dA0 == Approx(0.0837758040957).epsilon(1e-4));
}

TEST_CASE("preset catalog lists the thirteen experiments in order") {
    auto names = preset_names();
    std::vector<std::string> want = {"discocyte",       "torus", "biconcave", "early_gourd",
                                     "elongated_gourd", "gourd", "cylinder",  "two_sphere",
                                     "chain",           "three_armed", "four_armed",
                                     "six_armed",       "nested"};
    REQUIRE(names == want);
    std::set<std::string> uniq(names.begin(), names.end());
    CHECK(uniq.size() == names.size());
}

TEST_CASE("preset lookup throws on unknown names") {
    CHECK_THROWS_AS(preset("stomatocyte"), UnknownPreset);
    CHECK_NOTHROW(preset("discocyte"));
}

TEST_CASE("discocyte preset stores the published setup") {
    const ExperimentPreset& pr = preset("discocyte");
    CHECK(pr.domain.nx == 64);
    CHECK(pr.domain.lx == 1.0);
    CHECK(pr.params.epsilon == 0.04);
    CHECK(pr.params.kappa == 1.0);
    CHECK(pr.params.kappa_bar == 1.4);
    CHECK(pr.params.M1 == 1e5);
    CHECK(pr.params.M2 == 1e4);
    CHECK(pr.params.alpha == 0.0289);
    CHECK(pr.params.beta == 0.4880);
    CHECK(pr.params.dA0 == 0.1090);
    CHECK(pr.init.center == std::array<double, 3>{0.5, 0.5, 0.5});
    CHECK(pr.init.divisors == std::array<double, 3>{0.5, 0.5, 0.1});
    CHECK(pr.init.R == 0.35);
    CHECK(pr.init.epsilon == pr.params.epsilon);
    CHECK(pr.integrator.scheme == Scheme::semi_implicit);
    CHECK(pr.integrator.dt == 5e-7);
    CHECK(pr.expected_shape == "discocyte");
    CHECK(pr.varied.alpha);
    CHECK(pr.varied.beta);
    CHECK(pr.varied.dA0);
    // Resolved derived parameters: D defaults to (2/3) eps, A0 to beta.
    ModelParams r = pr.params.resolved();
    CHECK(r.D == Approx(2.0 / 3.0 * 0.04).margin(1e-15));
    CHECK(r.A0 == 0.4880);
}

TEST_CASE("catalog rows carry the printed targets") {
    struct Row {
        const char* name;
        double eps, dt, alpha, beta, dA0;
    };
    const Row rows[] = {
        {"torus", 0.03, 2e-7, 0.0652, 0.9092, 0.2839},
        {"biconcave", 0.05, 5e-7, 0.0077, 0.1992, 0.1614},
        {"early_gourd", 0.05, 5e-7, 0.0077, 0.2068, 0.1676},
        {"elongated_gourd", 0.05, 5e-7, 0.0077, 0.2390, 0.1906},
        {"gourd", 0.05, 5e-7, 0.0077, 0.2390, 0.2253},
        {"cylinder", 0.05, 5e-7, 0.0077, 0.2390, 0.2426},
        {"two_sphere", 0.02, 2e-7, 0.0074, 0.1969, 0.0711},
        {"chain", 0.02, 5e-7, 0.0074, 0.2328, 0.0958},
        {"three_armed", 0.02, 1e-7, 0.0226, 0.4489, 0.1520},
        {"four_armed", 0.02, 2e-7, 0.0097, 0.2550, 0.1146},
        {"six_armed", 0.02, 1e-7, 0.0529, 0.7911, 0.1766},
        {"nested", 0.03, 5e-7, 0.2693, 2.8347, 0.3939},
    };
    for (const Row& r : rows) {
        INFO(r.name);
        const ExperimentPreset& pr = preset(r.name);
        CHECK(pr.params.epsilon == r.eps);
        CHECK(pr.integrator.dt == r.dt);
        CHECK(pr.params.alpha == r.alpha);
        CHECK(pr.params.beta == r.beta);
        CHECK(pr.params.dA0 == r.dA0);
        CHECK(pr.init.epsilon == pr.params.epsilon);
        CHECK(pr.params.M2 == 1e4);
        CHECK(pr.params.M1 == (std::string(r.name) == "nested" ? 1e4 : 1e5));
    }
    const ExperimentPreset& nested = preset("nested");
    CHECK(nested.domain.nx == 100);
    CHECK(nested.domain.lx == 2.0);
    CHECK_FALSE(nested.varied.alpha);
}

TEST_CASE("every preset admits its own time step under the implicit symbol") {
    for (const auto& name : preset_names()) {
        INFO(name);
        const ExperimentPreset& pr = preset(name);
        ModelParams p = pr.params.resolved();
        double b = 2.0 * pr.integrator.dt * p.kappa / p.epsilon;
        double c = pr.integrator.dt * p.kappa * p.epsilon;
        CHECK(min_symbol(pr.domain, 1.0, b, c) > 0.0);
        CHECK(pr.integrator.dt * p.kappa < p.epsilon * p.epsilon * p.epsilon);
        CHECK_NOTHROW(p.validate());
        CHECK_NOTHROW(pr.init.validate(pr.domain));
    }
}

TEST_CASE("nested preset alpha agrees with the measured profile volume") {
    // The only non-varied constraint in the catalog: alpha is the literal
    // profile volume to within half a percent at the native 100^3 grid.
    const ExperimentPreset& pr = preset("nested");
    Field phi0 = tanh_ellipsoid(pr.init, pr.domain);
    Constraints c = derive_constraints(phi0, pr.params);
    CHECK(std::abs(c.alpha - pr.params.alpha) / pr.params.alpha < 0.005);
}
