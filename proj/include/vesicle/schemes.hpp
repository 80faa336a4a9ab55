#pragma once

#include <cmath>
#include <sstream>

#include "vesicle/model.hpp"

namespace vesicle {

enum class Scheme { forward_euler, semi_implicit, fully_implicit, backward_euler };

inline const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::forward_euler: return "forward_euler";
        case Scheme::semi_implicit: return "semi_implicit";
        case Scheme::fully_implicit: return "fully_implicit";
        case Scheme::backward_euler: return "backward_euler";
    }
    return "?";
}

inline Scheme scheme_from_name(const std::string& s) {
    if (s == "forward_euler") return Scheme::forward_euler;
    if (s == "semi_implicit") return Scheme::semi_implicit;
    if (s == "fully_implicit") return Scheme::fully_implicit;
    if (s == "backward_euler") return Scheme::backward_euler;
    throw std::invalid_argument("unknown scheme: " + s);
}

struct IntegratorConfig {
    Scheme scheme = Scheme::semi_implicit;
    double dt = 5e-7;
    double picard_tol = 1e-10;   // L-inf on the iteration update
    int picard_max_iters = 200;

    void validate() const {
        if (!(dt > 0)) throw std::invalid_argument("IntegratorConfig: dt must be > 0");
        if (!(picard_tol > 0))
            throw std::invalid_argument("IntegratorConfig: picard_tol must be > 0");
        if (picard_max_iters < 1)
            throw std::invalid_argument("IntegratorConfig: picard_max_iters must be >= 1");
    }
};

struct StoppingCriterion {
    long max_steps = 1000000;
    double rate_tol = 1e-2;     // on |phi_{n+1}-phi_n|_inf / dt
    double energy_tol = 1e-4;   // on |dE| / (dt * max(E_M, 1))

    void validate() const {
        if (max_steps < 1) throw std::invalid_argument("StoppingCriterion: max_steps >= 1");
        if (!(rate_tol > 0) || !(energy_tol > 0))
            throw std::invalid_argument("StoppingCriterion: tolerances must be > 0");
    }
};

namespace detail {

template <typename Real>
void require_finite(const ScalarField3D<Real>& f, const char* where) {
    if (!f.all_finite())
        throw NonFinite(std::string(where) + ": field contains NaN/Inf (reduce dt)");
}

} // namespace detail

/** Plain forward Euler: phi - dt * dE/dphi. */
template <typename Real>
ScalarField3D<Real> step_forward_euler(const ScalarField3D<Real>& phi, const ModelParams& pin,
                                       Real dt) {
    ModelParams p = pin.resolved();
    ScalarField3D<Real> vd = variational_derivative(phi, p);
    ScalarField3D<Real> out(phi.grid);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = phi.values[i] - dt * vd.values[i];
    detail::require_finite(out, "step_forward_euler");
    return out;
}

/**
 * Semi-implicit step: the stiff linear part of the bending term,
 * kappa*(eps*Lap^2 + (2/eps)*Lap), is taken at the new time level and
 * inverted spectrally; everything else is explicit. The Fourier symbol of
 * the implicit operator is 1 + dt*kappa*(eps*k^4 - 2k^2/eps), positive for
 * all k when dt*kappa < eps^3 (minimum at k^2 = 1/eps^2).
 */
template <typename Real>
ScalarField3D<Real> step_semi_implicit(const ScalarField3D<Real>& phi, const ModelParams& pin,
                                       Real dt) {
    ModelParams p = pin.resolved();
    const GridSpec& g = phi.grid;
    const Real eps = p.epsilon, Ce = p.C * p.epsilon;
    const std::size_t n = phi.values.size();
    const Real cell = Real(g.cell_volume());

    ScalarField3D<Real> sq(g), cu(g);
    for (std::size_t i = 0; i < n; ++i) {
        Real u = phi.values[i];
        sq.values[i] = u * u;
        cu.values[i] = u * u * u;
    }
    ScalarField3D<Real> lap = laplacian(phi);
    ScalarField3D<Real> lap2 = laplacian(sq);
    ScalarField3D<Real> lap3 = laplacian(cu);

    // scalar prefactors for the constraint terms
    Real V = kahan_sum_n<Real>(n, [&](std::size_t i) { return (phi.values[i] + 1) / 2; }) * cell;
    Real well = kahan_sum_n<Real>(n, [&](std::size_t i) {
        Real om = sq.values[i] - 1;
        return om * om;
    }) * cell;
    Real B = eps / 2 * dirichlet_energy(phi) + well / (4 * eps);
    Real A = Real(3) * std::sqrt(Real(2)) / 4 * B;
    Real dA = -(3 * p.D / 4) * cell *
              kahan_sum_n<Real>(n, [&](std::size_t i) {
                  Real u = phi.values[i];
                  Real om = 1 - sq.values[i];
                  return om * lap.values[i] + u * om * om / (eps * eps);
              });

    const Real h_pref = -(3 * p.kappa_bar * M_PI / (4 * p.A0 * p.D)) * (dA - p.dA0);
    const Real t1 = p.M1 * (V - p.alpha);
    const Real t2_pref = Real(3) * std::sqrt(Real(2)) / 2 * p.M2 * (A - p.beta);

    // explicit remainder of kappa*g after peeling off the implicit
    // eps*Lap^2 + (2/eps)*Lap part
    ScalarField3D<Real> rhs(g);
    for (std::size_t i = 0; i < n; ++i) {
        Real u = phi.values[i];
        Real u2 = sq.values[i];
        Real nl = p.kappa * (-lap3.values[i] / eps - p.C * lap2.values[i] -
                             (3 * u2 + 2 * Ce * u) * lap.values[i] / eps +
                             (3 * u2 + 2 * Ce * u - 1) * (u2 - 1) * (u + Ce) / (eps * eps * eps));
        Real ade = h_pref * (-2 * u * lap.values[i] - lap2.values[i] +
                             (1 - 6 * u2 + 5 * u2 * u2) / (eps * eps));
        Real f = eps * lap.values[i] - (u2 - 1) * u / eps;
        Real area = t2_pref * (-f);
        rhs.values[i] = u - dt * (((nl + ade) + t1) + area);
    }

    if (p.kappa == 0) {
        // implicit operator degenerates to the identity
        detail::require_finite(rhs, "step_semi_implicit");
        return rhs;
    }
    ScalarField3D<Real> out =
        implicit_solve(rhs, Real(1), Real(2) * dt * p.kappa / eps, dt * p.kappa * eps);
    detail::require_finite(out, "step_semi_implicit");
    return out;
}

/** The three symmetric two-level nonlinearities used by the implicit schemes. */
template <typename Real>
struct SymmetricNonlinearities {
    ScalarField3D<Real> f_sym, g_sym, h_sym;
};

namespace detail {

// Everything the implicit sweeps need about a single field.
template <typename Real>
struct LevelData {
    ScalarField3D<Real> lap;     // Lap(phi)
    ScalarField3D<Real> lap_sq;  // Lap(phi^2)
    ScalarField3D<Real> fc;      // f_c(phi)
    Real V = 0, A = 0, dA = 0;
};

template <typename Real>
LevelData<Real> level_data(const ScalarField3D<Real>& u, const ModelParams& p) {
    LevelData<Real> L;
    const Real eps = p.epsilon, Ce = p.C * p.epsilon;
    const std::size_t n = u.values.size();
    const Real cell = Real(u.grid.cell_volume());
    ScalarField3D<Real> sq(u.grid);
    for (std::size_t i = 0; i < n; ++i) sq.values[i] = u.values[i] * u.values[i];
    L.lap = laplacian(u);
    L.lap_sq = laplacian(sq);
    L.fc = ScalarField3D<Real>(u.grid);
    for (std::size_t i = 0; i < n; ++i) {
        Real v = u.values[i];
        L.fc.values[i] = eps * L.lap.values[i] - (sq.values[i] - 1) * (v + Ce) / eps;
    }
    L.V = kahan_sum_n<Real>(n, [&](std::size_t i) { return (u.values[i] + 1) / 2; }) * cell;
    Real well = kahan_sum_n<Real>(n, [&](std::size_t i) {
        Real om = sq.values[i] - 1;
        return om * om;
    }) * cell;
    Real B = eps / 2 * dirichlet_energy(u) + well / (4 * eps);
    L.A = Real(3) * std::sqrt(Real(2)) / 4 * B;
    L.dA = -(3 * p.D / 4) * cell *
           kahan_sum_n<Real>(n, [&](std::size_t i) {
               Real v = u.values[i];
               Real om = 1 - sq.values[i];
               return om * L.lap.values[i] + v * om * om / (eps * eps);
           });
    return L;
}

// Symmetric right-hand side kappa*g_sym + h_sym + t1_sym + t2_sym built
// from precomputed level data. Satisfies the exact difference identity
//   E(eta) - E(phi) = integral(rhs_sym(phi,eta) * (eta - phi))
// which is what gives the implicit schemes their discrete energy law.
template <typename Real>
ScalarField3D<Real> symmetric_rhs(const ScalarField3D<Real>& phi, const LevelData<Real>& Lp,
                                  const ScalarField3D<Real>& eta, const LevelData<Real>& Le,
                                  const ModelParams& p) {
    const GridSpec& g = phi.grid;
    const Real eps = p.epsilon, Ce = p.C * p.epsilon;
    const std::size_t n = phi.values.size();

    ScalarField3D<Real> sum_fc(g);
    for (std::size_t i = 0; i < n; ++i) sum_fc.values[i] = Lp.fc.values[i] + Le.fc.values[i];
    ScalarField3D<Real> lap_sum_fc = laplacian(sum_fc);

    const Real h_pref =
        -(3 * p.kappa_bar * M_PI / (8 * p.A0 * p.D)) * (Lp.dA + Le.dA - 2 * p.dA0);
    const Real t1 = p.M1 / 2 * (Lp.V + Le.V - 2 * p.alpha);
    const Real t2_pref = Real(3) * std::sqrt(Real(2)) / 4 * p.M2 * (Lp.A + Le.A - 2 * p.beta);

    ScalarField3D<Real> out(g);
    for (std::size_t i = 0; i < n; ++i) {
        Real u = phi.values[i], v = eta.values[i];
        Real u2 = u * u, v2 = v * v;
        Real fs = eps / 2 * (Lp.lap.values[i] + Le.lap.values[i]) -
                  (u2 + v2 - 2) * (u + v) / (4 * eps);
        Real gs = Real(0.5) * lap_sum_fc.values[i] -
                  (u2 + u * v + v2 + Ce * (u + v) - 1) * sum_fc.values[i] / (2 * eps * eps);
        // Two-level ADE factor. The delta-terms on the second line vanish
        // at eta == phi and make the difference identity for dA exact; the
        // plain symmetric average alone misses it at O(delta^3).
        Real d = v - u;
        Real lap_d = Le.lap.values[i] - Lp.lap.values[i];
        Real q = -u * Lp.lap.values[i] - v * Le.lap.values[i] -
                 Real(0.5) * (Lp.lap_sq.values[i] + Le.lap_sq.values[i]) +
                 (1 - 2 * u2 - 2 * v2 - 2 * u * v + 2 * u2 * u2 + 2 * v2 * v2 + u2 * v2) /
                     (eps * eps) +
                 Real(0.5) * d * lap_d - d * d * (u2 + u * v + v2) / (eps * eps);
        Real hs = h_pref * q;
        out.values[i] = ((p.kappa * gs + hs) + t1) + t2_pref * (-fs);
    }
    return out;
}

} // namespace detail

/** Symmetric two-level forms f(phi,eta), g(phi,eta), h(phi,eta). */
template <typename Real>
SymmetricNonlinearities<Real> symmetric_nonlinearities(const ScalarField3D<Real>& phi,
                                                       const ScalarField3D<Real>& eta,
                                                       const ModelParams& pin) {
    ModelParams p = pin.resolved();
    auto Lp = detail::level_data(phi, p);
    auto Le = detail::level_data(eta, p);
    const GridSpec& g = phi.grid;
    const Real eps = p.epsilon, Ce = p.C * p.epsilon;
    const std::size_t n = phi.values.size();

    SymmetricNonlinearities<Real> out;
    out.f_sym = ScalarField3D<Real>(g);
    out.g_sym = ScalarField3D<Real>(g);
    out.h_sym = ScalarField3D<Real>(g);

    ScalarField3D<Real> sum_fc(g);
    for (std::size_t i = 0; i < n; ++i) sum_fc.values[i] = Lp.fc.values[i] + Le.fc.values[i];
    ScalarField3D<Real> lap_sum_fc = laplacian(sum_fc);

    const Real h_pref =
        -(3 * p.kappa_bar * M_PI / (8 * p.A0 * p.D)) * (Lp.dA + Le.dA - 2 * p.dA0);
    for (std::size_t i = 0; i < n; ++i) {
        Real u = phi.values[i], v = eta.values[i];
        Real u2 = u * u, v2 = v * v;
        out.f_sym.values[i] = eps / 2 * (Lp.lap.values[i] + Le.lap.values[i]) -
                              (u2 + v2 - 2) * (u + v) / (4 * eps);
        out.g_sym.values[i] =
            Real(0.5) * lap_sum_fc.values[i] -
            (u2 + u * v + v2 + Ce * (u + v) - 1) * sum_fc.values[i] / (2 * eps * eps);
        Real d = v - u;
        Real lap_d = Le.lap.values[i] - Lp.lap.values[i];
        Real q = -u * Lp.lap.values[i] - v * Le.lap.values[i] -
                 Real(0.5) * (Lp.lap_sq.values[i] + Le.lap_sq.values[i]) +
                 (1 - 2 * u2 - 2 * v2 - 2 * u * v + 2 * u2 * u2 + 2 * v2 * v2 + u2 * v2) /
                     (eps * eps) +
                 Real(0.5) * d * lap_d - d * d * (u2 + u * v + v2) / (eps * eps);
        out.h_sym.values[i] = h_pref * q;
    }
    return out;
}

namespace detail {

// Preconditioned Picard sweep shared by both implicit schemes: solve
//   P eta' = target + (P - I) eta,
//   P = I + dt*kappa*(eps*Lap^2 + (2/eps)*Lap) - dt*stab*(eps/2)*Lap
// so the stiff linear parts cancel through the iteration. stab is the
// coefficient of the -(eps/2)*Lap(eta) piece inside the scheme's explicit
// area-penalty term: that piece is stiff enough to break the plain-bending
// contraction at large M2 and must be inside P. The symmetric f carries
// (eps/2)*Lap(eta), so the fully implicit scheme passes its prefactor as is;
// the single-level f carries eps*Lap(eta), so backward Euler passes twice
// its prefactor. The coefficient is frozen per sweep, so the fixed point is
// unchanged. Negative prefactors (area below target) are clamped to zero to
// keep the symbol of P positive; they are not stiff in the damping sense.
template <typename Real>
ScalarField3D<Real> preconditioned_update(const ScalarField3D<Real>& target,
                                          const ScalarField3D<Real>& eta,
                                          const ScalarField3D<Real>& lap_eta,
                                          const ModelParams& p, Real dt, Real stab_in) {
    const Real eps = p.epsilon;
    const Real stab = stab_in > 0 ? stab_in : Real(0);
    const Real b = 2 * dt * p.kappa / eps - dt * stab * eps / 2;
    const Real c = dt * p.kappa * eps;
    if (b == 0 && c == 0) return target;
    ScalarField3D<Real> pre(target.grid);
    if (p.kappa > 0) {
        ScalarField3D<Real> bih = laplacian(lap_eta);
        for (std::size_t i = 0; i < pre.values.size(); ++i)
            pre.values[i] = target.values[i] +
                            dt * p.kappa * (eps * bih.values[i] + 2 / eps * lap_eta.values[i]) -
                            dt * stab * eps / 2 * lap_eta.values[i];
    } else {
        for (std::size_t i = 0; i < pre.values.size(); ++i)
            pre.values[i] = target.values[i] - dt * stab * eps / 2 * lap_eta.values[i];
    }
    return implicit_solve(pre, Real(1), b, c);
}

} // namespace detail

/**
 * Fully implicit step: Picard iteration on
 *   eta = phi - dt * rhs_sym(phi, eta)
 * initialized from the semi-implicit step. Converged iterates satisfy the
 * discrete energy law E(eta) - E(phi) + (1/dt)*integral((eta-phi)^2) = 0
 * up to Picard and round-off residuals.
 */
template <typename Real>
ScalarField3D<Real> step_fully_implicit(const ScalarField3D<Real>& phi, const ModelParams& pin,
                                        Real dt, const IntegratorConfig& cfg) {
    ModelParams p = pin.resolved();
    auto Lp = detail::level_data(phi, p);
    ScalarField3D<Real> eta = step_semi_implicit(phi, p, dt);
    for (int it = 0; it < cfg.picard_max_iters; ++it) {
        auto Le = detail::level_data(eta, p);
        ScalarField3D<Real> rhs = detail::symmetric_rhs(phi, Lp, eta, Le, p);
        ScalarField3D<Real> target(phi.grid);
        for (std::size_t i = 0; i < target.values.size(); ++i)
            target.values[i] = phi.values[i] - dt * rhs.values[i];
        Real t2p = Real(3) * std::sqrt(Real(2)) / 4 * p.M2 * (Lp.A + Le.A - 2 * p.beta);
        ScalarField3D<Real> next = detail::preconditioned_update(target, eta, Le.lap, p, dt, t2p);
        if (!next.all_finite())
            throw PicardDiverged("step_fully_implicit: iterates became non-finite (reduce dt)");
        Real du = linf_diff(next, eta);
        eta = std::move(next);
        if (du <= cfg.picard_tol) return eta;
    }
    std::ostringstream msg;
    msg << "step_fully_implicit: Picard did not reach " << cfg.picard_tol << " in "
        << cfg.picard_max_iters << " sweeps (reduce dt)";
    throw PicardDiverged(msg.str());
}

/**
 * Backward Euler: every term evaluated at the new level, same Picard
 * strategy. The accepted iterate must satisfy the one-sided inequality
 *   E(eta) - E(phi) + (1/(2dt))*integral((eta-phi)^2) <= slack
 * (slack = 1e-8 * max(1, E(phi))); violations throw, signalling a
 * non-minimizing root of the nonlinear system.
 */
template <typename Real>
ScalarField3D<Real> step_backward_euler(const ScalarField3D<Real>& phi, const ModelParams& pin,
                                        Real dt, const IntegratorConfig& cfg) {
    ModelParams p = pin.resolved();
    const Real eps = p.epsilon, Ce = p.C * p.epsilon;
    ScalarField3D<Real> eta = step_semi_implicit(phi, p, dt);
    bool converged = false;
    for (int it = 0; it < cfg.picard_max_iters && !converged; ++it) {
        auto Le = detail::level_data(eta, p);
        ScalarField3D<Real> lap_fc = laplacian(Le.fc);
        const Real h_pref = -(3 * p.kappa_bar * M_PI / (4 * p.A0 * p.D)) * (Le.dA - p.dA0);
        const Real t1 = p.M1 * (Le.V - p.alpha);
        const Real t2p = Real(3) * std::sqrt(Real(2)) / 2 * p.M2 * (Le.A - p.beta);
        ScalarField3D<Real> target(phi.grid);
        for (std::size_t i = 0; i < target.values.size(); ++i) {
            Real v = eta.values[i], v2 = v * v;
            Real bend = p.kappa * (lap_fc.values[i] -
                                   (3 * v2 + 2 * Ce * v - 1) * Le.fc.values[i] / (eps * eps));
            Real ade = h_pref * (-2 * v * Le.lap.values[i] - Le.lap_sq.values[i] +
                                 (1 - 6 * v2 + 5 * v2 * v2) / (eps * eps));
            Real f = Le.fc.values[i] + Ce * (v2 - 1) / eps;  // strip the C part of f_c
            Real vd = ((bend + ade) + t1) + t2p * (-f);
            target.values[i] = phi.values[i] - dt * vd;
        }
        ScalarField3D<Real> next =
            detail::preconditioned_update(target, eta, Le.lap, p, dt, 2 * t2p);
        if (!next.all_finite())
            throw PicardDiverged("step_backward_euler: iterates became non-finite (reduce dt)");
        Real du = linf_diff(next, eta);
        eta = std::move(next);
        converged = du <= cfg.picard_tol;
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "step_backward_euler: Picard did not reach " << cfg.picard_tol << " in "
            << cfg.picard_max_iters << " sweeps (reduce dt)";
        throw PicardDiverged(msg.str());
    }
    EnergyBreakdown e0 = total_energy(phi, p);
    EnergyBreakdown e1 = total_energy(eta, p);
    Real d2 = kahan_sum_n<Real>(phi.values.size(), [&](std::size_t i) {
        Real d = eta.values[i] - phi.values[i];
        return d * d;
    }) * Real(phi.grid.cell_volume());
    Real lhs = (e1.E_M - e0.E_M) + d2 / (2 * dt);
    Real slack = 1e-8 * std::max(1.0, e0.E_M);
    if (lhs > slack) {
        std::ostringstream msg;
        msg << "step_backward_euler: energy inequality violated by " << lhs
            << " (slack " << slack << "); reduce dt";
        throw EnergyInequalityViolated(msg.str());
    }
    return eta;
}

/** Dispatch one step of the configured scheme. */
template <typename Real>
ScalarField3D<Real> advance(const ScalarField3D<Real>& phi, const ModelParams& p,
                            const IntegratorConfig& cfg) {
    switch (cfg.scheme) {
        case Scheme::forward_euler: return step_forward_euler(phi, p, Real(cfg.dt));
        case Scheme::semi_implicit: return step_semi_implicit(phi, p, Real(cfg.dt));
        case Scheme::fully_implicit: return step_fully_implicit(phi, p, Real(cfg.dt), cfg);
        case Scheme::backward_euler: return step_backward_euler(phi, p, Real(cfg.dt), cfg);
    }
    throw std::logic_error("advance: bad scheme");
}

} // namespace vesicle
