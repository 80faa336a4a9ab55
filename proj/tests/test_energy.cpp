#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "vesicle/model.hpp"
#include "vesicle/scenario.hpp"

using namespace vesicle;

namespace {

Field smooth_field(const GridSpec& g, unsigned seed, double amp) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ph(0, 2 * M_PI), co(-1, 1);
    Field f(g);
    for (int m = 0; m < 24; ++m) {
        int ax = int(rng() % 4) - 2, ay = int(rng() % 4) - 2, az = int(rng() % 4) - 2;
        double c = co(rng), p0 = ph(rng);
        for (int k = 0; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    f.at(i, j, k) +=
                        c * std::sin(2 * M_PI *
                                         (double(ax) * i / g.nx + double(ay) * j / g.ny +
                                          double(az) * k / g.nz) +
                                     p0);
    }
    double peak = 0;
    for (double v : f.values) peak = std::max(peak, std::abs(v));
    for (double& v : f.values) v *= amp / peak;
    return f;
}

} // namespace

TEST_CASE("uniform interior phase has zero interface functionals") {
    GridSpec g = cube_grid(16, 2.0);  // volume 8
    Field one(g);
    for (double& v : one.values) v = 1.0;
    ModelParams p;
    p.epsilon = 0.05;
    p.alpha = 0.3;
    p.beta = 0.7;
    p.dA0 = 0.2;
    ModelParams rp = p.resolved();

    REQUIRE(bending_energy_W(one, p) == 0.0);
    auto [B, A] = gl_B_and_area_A(one, p);
    REQUIRE(B == 0.0);
    REQUIRE(A == 0.0);
    REQUIRE(volume_V(one) == Catch::Approx(8.0).epsilon(1e-14));
    REQUIRE(area_difference_dA(one, p) == 0.0);

    EnergyBreakdown e = total_energy(one, p);
    REQUIRE(e.W == 0.0);
    double g_want = rp.kappa_bar / 2 * (M_PI / (rp.A0 * rp.D * rp.D)) * p.dA0 * p.dA0;
    REQUIRE(e.G == Catch::Approx(g_want).epsilon(1e-13));
    REQUIRE(e.T1 == Catch::Approx(p.M1 * (8.0 - p.alpha) * (8.0 - p.alpha)).epsilon(1e-12));
    REQUIRE(e.T2 == Catch::Approx(p.M2 * p.beta * p.beta).epsilon(1e-13));
}

TEST_CASE("uniform zero phase has the closed-form well energy") {
    GridSpec g = cube_grid(16);
    Field zero(g);
    ModelParams p;
    p.epsilon = 0.08;
    p.beta = 0.5;

    // well term only: B = |box| / (4 eps)
    auto [B, A] = gl_B_and_area_A(zero, p);
    REQUIRE(B == Catch::Approx(1.0 / (4 * p.epsilon)).epsilon(1e-13));
    REQUIRE(A == Catch::Approx(3 * std::sqrt(2.0) / 4 * B).epsilon(1e-15));
    REQUIRE(volume_V(zero) == Catch::Approx(0.5).epsilon(1e-14));
    REQUIRE(bending_energy_W(zero, p) == 0.0);  // f_c = 0 when C = 0
    REQUIRE(area_difference_dA(zero, p) == 0.0);
}

TEST_CASE("spontaneous-curvature shift enters f_c as printed") {
    GridSpec g = cube_grid(16);
    ModelParams p;
    p.epsilon = 0.1;
    p.C = 1.5;
    p.beta = 0.5;
    Field zero(g);
    Field fc = f_c_of(zero, p);
    // f_c(0) = -(1/eps)(0 - 1)(0 + C*eps) = C
    for (double v : fc.values) REQUIRE(v == Catch::Approx(p.C).margin(1e-12));

    // f strips the C part: f = f_c + C*eps*(phi^2-1)/eps
    Field phi = smooth_field(g, 3, 0.8);
    Field f = f_of(phi, p);
    Field fcp = f_c_of(phi, p);
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        double expect = fcp.values[i] + p.C * (phi.values[i] * phi.values[i] - 1);
        REQUIRE(f.values[i] == Catch::Approx(expect).margin(1e-12));
    }
}

TEST_CASE("functionals of a tanh sphere match the independent radial quadrature") {
    // Frozen from tools/radial_oracle.py (composite Simpson, 3e5 panels,
    // signed-distance profile, r = 0.25, D = (2/3) eps).
    struct Row {
        double eps, V, A, dA, tolV, tolA, toldA;
    };
    const Row rows[] = {
        {0.04, 0.0737182653195, 0.79836533189, 0.167551608789, 2e-4, 1e-6, 5e-6},
        {0.03, 0.0701007902701, 0.792692195852, 0.125663706145, 1e-5, 1e-9, 1e-7},
        {0.02, 0.0675169320633, 0.7886399556, 0.0837758040957, 1e-7, 1e-7, 1e-4},
    };
    GridSpec g = cube_grid(64);
    for (const Row& r : rows) {
        ModelParams p;
        p.epsilon = r.eps;
        p.beta = 1.0;
        Field phi = tanh_sphere({0.5, 0.5, 0.5}, 0.25, r.eps, g);
        REQUIRE(volume_V(phi) == Catch::Approx(r.V).epsilon(r.tolV));
        REQUIRE(gl_B_and_area_A(phi, p).second == Catch::Approx(r.A).epsilon(r.tolA));
        REQUIRE(area_difference_dA(phi, p) == Catch::Approx(r.dA).epsilon(r.toldA));
    }
    // B at eps = 0.02 (A = 3 sqrt(2)/4 * B pins the other)
    ModelParams p;
    p.epsilon = 0.02;
    p.beta = 1.0;
    Field phi = tanh_sphere({0.5, 0.5, 0.5}, 0.25, 0.02, g);
    REQUIRE(gl_B_and_area_A(phi, p).first == Catch::Approx(0.743536880692).epsilon(1e-7));
}

TEST_CASE("total_energy agrees with the individual functionals and sums exactly") {
    GridSpec g = cube_grid(16);
    ModelParams p;
    p.epsilon = 0.12;
    p.kappa = 0.8;
    p.kappa_bar = 1.4;
    p.C = 0.3;
    p.M1 = 50;
    p.M2 = 75;
    p.alpha = 0.4;
    p.beta = 0.9;
    p.dA0 = 0.03;
    Field phi = smooth_field(g, 17, 0.9);

    EnergyBreakdown e = total_energy(phi, p);
    auto close = [](double a, double b) {
        REQUIRE(a == Catch::Approx(b).epsilon(1e-12).margin(1e-14));
    };
    close(e.W, bending_energy_W(phi, p));
    close(e.G, ade_energy_G(phi, p));
    auto [t1, t2] = penalties_T1_T2(phi, p);
    close(e.T1, t1);
    close(e.T2, t2);
    close(e.V, volume_V(phi));
    close(e.A, gl_B_and_area_A(phi, p).second);
    close(e.dA, area_difference_dA(phi, p));
    // decomposition identity is bit-exact by construction
    REQUIRE(e.E_M == ((e.W + e.G) + e.T1) + e.T2);
}

TEST_CASE("parameter resolution fills D and A0 and validates") {
    ModelParams p;
    p.epsilon = 0.06;
    p.beta = 0.42;
    ModelParams r = p.resolved();
    REQUIRE(r.D == Catch::Approx(0.04).epsilon(1e-15));
    REQUIRE(r.A0 == Catch::Approx(0.42).epsilon(1e-15));
    REQUIRE_NOTHROW(p.validate());

    ModelParams explicit_d = p;
    explicit_d.D = 0.11;
    explicit_d.A0 = 2.0;
    ModelParams r2 = explicit_d.resolved();
    REQUIRE(r2.D == 0.11);
    REQUIRE(r2.A0 == 2.0);

    ModelParams bad;
    bad.epsilon = 0.05;  // beta = 0 and A0 = 0: no area scale
    REQUIRE_THROWS_AS(bad.validate(), std::invalid_argument);
    ModelParams neg;
    neg.epsilon = -1;
    REQUIRE_THROWS_AS(neg.validate(), std::invalid_argument);
}
