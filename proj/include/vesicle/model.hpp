#pragma once

#include <cmath>
#include <optional>

#include "vesicle/spectral.hpp"

namespace vesicle {

/**
 * Physical and penalty parameters of the membrane energy.
 *
 * epsilon   interface width
 * kappa     bending modulus
 * kappa_bar area-difference-elasticity modulus
 * C         sqrt(2) times the spontaneous curvature (zero in all presets)
 * D         leaflet separation; defaults to (2/3)*epsilon
 * M1, M2    penalty coefficients for the volume and area constraints
 * alpha     volume target
 * beta      area target
 * dA0       relaxed area difference
 * A0        area scale in the ADE prefactor; defaults to beta
 */
struct ModelParams {
    double epsilon = 0.04;
    double kappa = 1.0;
    double kappa_bar = 1.4;
    double C = 0.0;
    double D = 0.0;     // 0 means: use (2/3)*epsilon
    double M1 = 1e5;
    double M2 = 1e4;
    double alpha = 0.0;
    double beta = 0.0;
    double dA0 = 0.0;
    double A0 = 0.0;    // 0 means: use beta

    // Fill the two dependent defaults. Idempotent.
    ModelParams resolved() const {
        ModelParams p = *this;
        if (p.D == 0.0) p.D = 2.0 / 3.0 * p.epsilon;
        if (p.A0 == 0.0) p.A0 = p.beta;
        return p;
    }

    void validate() const {
        if (!(epsilon > 0)) throw std::invalid_argument("ModelParams: epsilon must be > 0");
        if (kappa < 0 || kappa_bar < 0)
            throw std::invalid_argument("ModelParams: kappa, kappa_bar must be >= 0");
        if (M1 < 0 || M2 < 0)
            throw std::invalid_argument("ModelParams: M1, M2 must be >= 0");
        ModelParams r = resolved();
        if (!(r.D > 0)) throw std::invalid_argument("ModelParams: D must be > 0");
        if (!(r.A0 > 0))
            throw std::invalid_argument("ModelParams: A0 must be > 0 (set A0 or beta)");
    }
};

/** One evaluation of every monitored functional. E_M = W + G + T1 + T2. */
struct EnergyBreakdown {
    double W = 0, G = 0, T1 = 0, T2 = 0, E_M = 0;
    double V = 0, A = 0, dA = 0;
};

namespace detail {

// Shared intermediates for one field: spectral Laplacian plus the Fourier
// Dirichlet term, computed with a single forward transform.
template <typename Real>
struct FieldDerivs {
    ScalarField3D<Real> lap;
    Real dirichlet = 0;
};

template <typename Real>
FieldDerivs<Real> derivs_of(const ScalarField3D<Real>& phi) {
    auto& ctx = fft_context<Real>(phi.grid);
    std::vector<std::complex<Real>> spec;
    ctx.forward(phi.values, spec);
    FieldDerivs<Real> d;
    const Real n = Real(phi.grid.npts());
    std::vector<Real> terms(spec.size());
    ctx.for_each_mode([&](std::size_t idx, Real kx, Real ky, Real kz, Real w) {
        Real k2 = kx * kx + ky * ky + kz * kz;
        terms[idx] = w * k2 * std::norm(spec[idx]);
        spec[idx] *= -k2;
    });
    d.dirichlet = kahan_sum(terms) / (n * n) * Real(phi.grid.volume());
    d.lap = ScalarField3D<Real>(phi.grid);
    ctx.inverse(spec, d.lap.values);
    return d;
}

} // namespace detail

/** f = eps*Lap(phi) - (1/eps)*(phi^2 - 1)*phi (Allen-Cahn residual). */
template <typename Real>
ScalarField3D<Real> f_of(const ScalarField3D<Real>& phi, const ModelParams& pin) {
    ModelParams p = pin.resolved();
    ScalarField3D<Real> out = laplacian(phi);
    const Real eps = p.epsilon;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        Real u = phi.values[i];
        out.values[i] = eps * out.values[i] - (u * u - 1) * u / eps;
    }
    return out;
}

/** f_c = eps*Lap(phi) - (1/eps)*(phi^2 - 1)*(phi + C*eps). */
template <typename Real>
ScalarField3D<Real> f_c_of(const ScalarField3D<Real>& phi, const ModelParams& pin) {
    ModelParams p = pin.resolved();
    ScalarField3D<Real> out = laplacian(phi);
    const Real eps = p.epsilon, Ce = p.C * p.epsilon;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        Real u = phi.values[i];
        out.values[i] = eps * out.values[i] - (u * u - 1) * (u + Ce) / eps;
    }
    return out;
}

/** Bending energy W = (kappa/(2*eps)) * integral(f_c^2). */
template <typename Real>
Real bending_energy_W(const ScalarField3D<Real>& phi, const ModelParams& pin) {
    ModelParams p = pin.resolved();
    ScalarField3D<Real> fc = f_c_of(phi, p);
    for (Real& v : fc.values) v = v * v;
    return p.kappa / (2 * p.epsilon) * integrate(fc);
}

/** Enclosed volume V = integral((phi+1)/2). */
template <typename Real>
Real volume_V(const ScalarField3D<Real>& phi) {
    Real s = kahan_sum_n<Real>(phi.values.size(),
                               [&](std::size_t i) { return (phi.values[i] + 1) / 2; });
    return s * Real(phi.grid.cell_volume());
}

/**
 * Ginzburg-Landau functional B and membrane area A = (3*sqrt(2)/4)*B.
 * The gradient term uses the Fourier-side Dirichlet form, which is the
 * discretization that integrates by parts exactly against the spectral
 * Laplacian (keeps the scheme energy identities at round-off level).
 */
template <typename Real>
std::pair<Real, Real> gl_B_and_area_A(const ScalarField3D<Real>& phi, const ModelParams& pin) {
    ModelParams p = pin.resolved();
    const Real eps = p.epsilon;
    Real dir = dirichlet_energy(phi);
    Real well = kahan_sum_n<Real>(phi.values.size(), [&](std::size_t i) {
        Real u = phi.values[i];
        Real w = u * u - 1;
        return w * w;
    });
    well *= Real(phi.grid.cell_volume());
    Real B = eps / 2 * dir + well / (4 * eps);
    return {B, Real(3) * std::sqrt(Real(2)) / 4 * B};
}

/** Area difference dA = -(3D/4) * integral((1-phi^2)*Lap(phi) + phi*(1-phi^2)^2/eps^2). */
template <typename Real>
Real area_difference_dA(const ScalarField3D<Real>& phi, const ModelParams& pin) {
    ModelParams p = pin.resolved();
    ScalarField3D<Real> lap = laplacian(phi);
    const Real eps2 = p.epsilon * p.epsilon;
    Real s = kahan_sum_n<Real>(phi.values.size(), [&](std::size_t i) {
        Real u = phi.values[i];
        Real om = 1 - u * u;
        return om * lap.values[i] + u * om * om / eps2;
    });
    return -(3 * p.D / 4) * s * Real(phi.grid.cell_volume());
}

/** ADE energy G = (kappa_bar/2) * (pi/(A0*D^2)) * (dA - dA0)^2. */
template <typename Real>
Real ade_energy_G(const ScalarField3D<Real>& phi, const ModelParams& pin) {
    ModelParams p = pin.resolved();
    Real d = area_difference_dA(phi, p) - p.dA0;
    return p.kappa_bar / 2 * (M_PI / (p.A0 * p.D * p.D)) * d * d;
}

/** Penalties T1 = M1*(V-alpha)^2, T2 = M2*(A-beta)^2. */
template <typename Real>
std::pair<Real, Real> penalties_T1_T2(const ScalarField3D<Real>& phi, const ModelParams& pin) {
    ModelParams p = pin.resolved();
    Real dv = volume_V(phi) - p.alpha;
    Real da = gl_B_and_area_A(phi, p).second - p.beta;
    return {p.M1 * dv * dv, p.M2 * da * da};
}

/** Every functional in one pass over shared intermediates. */
template <typename Real>
EnergyBreakdown total_energy(const ScalarField3D<Real>& phi, const ModelParams& pin) {
    ModelParams p = pin.resolved();
    auto d = detail::derivs_of(phi);
    const Real eps = p.epsilon, Ce = p.C * p.epsilon;
    const Real cell = Real(phi.grid.cell_volume());
    const std::size_t n = phi.values.size();

    Real w_int = kahan_sum_n<Real>(n, [&](std::size_t i) {
        Real u = phi.values[i];
        Real fc = eps * d.lap.values[i] - (u * u - 1) * (u + Ce) / eps;
        return fc * fc;
    });
    Real well = kahan_sum_n<Real>(n, [&](std::size_t i) {
        Real u = phi.values[i];
        Real om = u * u - 1;
        return om * om;
    });
    Real vsum = kahan_sum_n<Real>(n, [&](std::size_t i) { return (phi.values[i] + 1) / 2; });
    Real dasum = kahan_sum_n<Real>(n, [&](std::size_t i) {
        Real u = phi.values[i];
        Real om = 1 - u * u;
        return om * d.lap.values[i] + u * om * om / (eps * eps);
    });

    EnergyBreakdown e;
    e.W = p.kappa / (2 * eps) * (w_int * cell);
    Real B = eps / 2 * d.dirichlet + (well * cell) / (4 * eps);
    e.V = vsum * cell;
    e.A = Real(3) * std::sqrt(Real(2)) / 4 * B;
    e.dA = -(3 * p.D / 4) * (dasum * cell);
    Real gd = e.dA - p.dA0;
    e.G = p.kappa_bar / 2 * (M_PI / (p.A0 * p.D * p.D)) * gd * gd;
    e.T1 = p.M1 * (e.V - p.alpha) * (e.V - p.alpha);
    e.T2 = p.M2 * (e.A - p.beta) * (e.A - p.beta);
    // fixed summation order: the breakdown identity is bit-exact
    e.E_M = ((e.W + e.G) + e.T1) + e.T2;
    return e;
}

/** Per-term decomposition of the variational derivative. */
template <typename Real>
struct VariationalTerms {
    ScalarField3D<Real> bending;  // kappa * g
    ScalarField3D<Real> ade;      // h
    ScalarField3D<Real> volume;   // M1*(V - alpha), constant field
    ScalarField3D<Real> area;     // (3*sqrt(2)/2)*M2*(A - beta)*(-f)
};

/**
 * Full variational derivative dE_M/dphi:
 *   kappa*g + h + M1*(V-alpha) + (3*sqrt(2)/2)*M2*(A-beta)*(-f)
 * with g = Lap(f_c) - (1/eps^2)*(3phi^2 + 2C*eps*phi - 1)*f_c and
 * h = -(3*kappa_bar*pi/(4*A0*D)) * (dA - dA0) *
 *     (-2phi*Lap(phi) - Lap(phi^2) + (1 - 6phi^2 + 5phi^4)/eps^2).
 */
template <typename Real>
ScalarField3D<Real> variational_derivative(const ScalarField3D<Real>& phi, const ModelParams& pin,
                                           VariationalTerms<Real>* terms = nullptr) {
    ModelParams p = pin.resolved();
    const GridSpec& g = phi.grid;
    const Real eps = p.epsilon, Ce = p.C * p.epsilon;
    const std::size_t n = phi.values.size();

    auto d = detail::derivs_of(phi);

    // f_c and the cubic-shifted coefficients
    ScalarField3D<Real> fc(g), sq(g);
    for (std::size_t i = 0; i < n; ++i) {
        Real u = phi.values[i];
        fc.values[i] = eps * d.lap.values[i] - (u * u - 1) * (u + Ce) / eps;
        sq.values[i] = u * u;
    }
    ScalarField3D<Real> lap_fc = laplacian(fc);
    ScalarField3D<Real> lap_sq = laplacian(sq);

    // scalar prefactors
    const Real cell = Real(g.cell_volume());
    Real V = kahan_sum_n<Real>(n, [&](std::size_t i) { return (phi.values[i] + 1) / 2; }) * cell;
    Real well = kahan_sum_n<Real>(n, [&](std::size_t i) {
        Real om = sq.values[i] - 1;
        return om * om;
    }) * cell;
    Real B = eps / 2 * d.dirichlet + well / (4 * eps);
    Real A = Real(3) * std::sqrt(Real(2)) / 4 * B;
    Real dA = -(3 * p.D / 4) * cell *
              kahan_sum_n<Real>(n, [&](std::size_t i) {
                  Real u = phi.values[i];
                  Real om = 1 - sq.values[i];
                  return om * d.lap.values[i] + u * om * om / (eps * eps);
              });

    const Real h_pref = -(3 * p.kappa_bar * M_PI / (4 * p.A0 * p.D)) * (dA - p.dA0);
    const Real t1 = p.M1 * (V - p.alpha);
    const Real t2_pref = Real(3) * std::sqrt(Real(2)) / 2 * p.M2 * (A - p.beta);

    ScalarField3D<Real> out(g);
    ScalarField3D<Real>*bp = nullptr, *ap = nullptr, *vp = nullptr, *sp = nullptr;
    if (terms) {
        terms->bending = ScalarField3D<Real>(g);
        terms->ade = ScalarField3D<Real>(g);
        terms->volume = ScalarField3D<Real>(g);
        terms->area = ScalarField3D<Real>(g);
        bp = &terms->bending;
        ap = &terms->ade;
        vp = &terms->volume;
        sp = &terms->area;
    }
    for (std::size_t i = 0; i < n; ++i) {
        Real u = phi.values[i];
        Real u2 = sq.values[i];
        Real bend = p.kappa *
                    (lap_fc.values[i] - (3 * u2 + 2 * Ce * u - 1) * fc.values[i] / (eps * eps));
        Real ade = h_pref * (-2 * u * d.lap.values[i] - lap_sq.values[i] +
                             (1 - 6 * u2 + 5 * u2 * u2) / (eps * eps));
        Real f = eps * d.lap.values[i] - (u2 - 1) * u / eps;
        Real area = t2_pref * (-f);
        out.values[i] = bend + ade + t1 + area;
        if (terms) {
            bp->values[i] = bend;
            ap->values[i] = ade;
            vp->values[i] = t1;
            sp->values[i] = area;
        }
    }
    return out;
}

} // namespace vesicle
