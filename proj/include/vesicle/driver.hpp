#pragma once

#include <functional>

#include "vesicle/schemes.hpp"

namespace vesicle {

/** One diagnostics sample: step index, time, energy breakdown, rate. */
struct DiagnosticsRow {
    long step = 0;
    double time = 0.0;
    double rate = 0.0;  // |phi_n - phi_{n-1}|_inf / dt, 0 for the initial row
    EnergyBreakdown energy;
};

struct RunResult {
    Field phi;
    std::vector<DiagnosticsRow> history;  // rows at steps 0, c, 2c, ..., final
    long steps_taken = 0;
    bool converged = false;
};

using RowHook = std::function<void(const DiagnosticsRow&)>;
using StepHook = std::function<void(long step, const Field&)>;

/**
 * March phi0 under the configured scheme until steady state or max_steps.
 *
 * Diagnostics (full energy breakdown) are sampled every `hook_cadence`
 * steps and at the final step. Convergence is tested at those sampling
 * points: the run stops once the pointwise rate |dphi|_inf/dt at the
 * sampled step is <= rate_tol and the mean energy slope since the previous
 * sample, |dE| / (dt * steps * max(|E_M|, 1)), is <= energy_tol.
 *
 * `on_row` fires for every history row as it is produced; `per_step` fires
 * after every accepted step (snapshot/checkpoint cadences hang off it).
 *
 * Implicit schemes refuse to start if the implicit symbol
 * 1 - (2 dt kappa / eps) k^2 + dt kappa eps k^4 is not positive for every
 * mode of the grid, i.e. unless dt * kappa < eps^3.
 */
inline RunResult run_to_steady_state(const Field& phi0, const ModelParams& pin,
                                     const IntegratorConfig& icfg, const StoppingCriterion& stop,
                                     int hook_cadence = 100, const RowHook& on_row = {},
                                     const StepHook& per_step = {}) {
    ModelParams p = pin.resolved();
    p.validate();
    icfg.validate();
    stop.validate();
    if (hook_cadence < 1) throw std::invalid_argument("hook_cadence must be >= 1");

    if (icfg.scheme != Scheme::forward_euler && p.kappa > 0) {
        double ms = min_symbol(phi0.grid, 1.0, 2.0 * icfg.dt * p.kappa / p.epsilon,
                               icfg.dt * p.kappa * p.epsilon);
        if (ms <= 0) {
            std::ostringstream msg;
            msg << "implicit symbol not positive (min " << ms << "); require dt*kappa < eps^3 = "
                << p.epsilon * p.epsilon * p.epsilon;
            throw NonPositiveSymbol(msg.str());
        }
    }

    RunResult res;
    res.phi = phi0;

    auto sample = [&](long step, double rate) {
        DiagnosticsRow row;
        row.step = step;
        row.time = step * icfg.dt;
        row.rate = rate;
        row.energy = total_energy(res.phi, p);
        res.history.push_back(row);
        if (on_row) on_row(row);
        return row;
    };

    DiagnosticsRow prev = sample(0, 0.0);

    long step = 0;
    while (step < stop.max_steps) {
        Field next = advance(res.phi, p, icfg);
        double rate = linf_diff(next, res.phi) / icfg.dt;
        res.phi = std::move(next);
        ++step;
        if (per_step) per_step(step, res.phi);

        bool at_sample = (step % hook_cadence == 0) || step == stop.max_steps;
        if (!at_sample) continue;

        DiagnosticsRow row = sample(step, rate);
        long span = row.step - prev.step;
        double slope = std::abs(row.energy.E_M - prev.energy.E_M) /
                       (icfg.dt * span * std::max(std::abs(row.energy.E_M), 1.0));
        prev = row;
        if (rate <= stop.rate_tol && slope <= stop.energy_tol) {
            res.converged = true;
            break;
        }
    }
    res.steps_taken = step;
    return res;
}

} // namespace vesicle
