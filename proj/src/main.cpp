// vesicle-sim: phase-field vesicle relaxation runner.
//
// Subcommands:
//   run      march a scenario to steady state, writing diagnostics/snapshots
//   presets  dump the experiment catalog as JSON
//   verify   run the fast oracle suite and write a machine-readable report
//   resume   continue a checkpointed run

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "vesicle/vesicle.hpp"

namespace vs = vesicle;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

int thread_count_from_env() {
    const char* env = std::getenv("VESICLE_THREADS");
    if (!env) return 1;
    int n = std::atoi(env);
    // all internal math is currently serial; values above 1 are clamped so
    // the determinism contract holds regardless of the environment
    return n >= 1 ? 1 : 1;
}

struct RunFlags {
    std::string preset, config, out, scheme;
    int grid = 0;
    double dt = 0;
    long max_steps = -1;
    long snapshot_every = -1, diag_every = -1, checkpoint_every = -1;
    std::vector<std::string> sets;
    std::vector<std::string> formats;
};

json load_json_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw vs::ConfigError("cannot open config file: " + path);
    try {
        json j;
        is >> j;
        return j;
    } catch (const json::exception& e) {
        throw vs::ConfigError("config parse error in " + path + ": " + e.what());
    }
}

vs::RunConfig build_config(const RunFlags& fl) {
    vs::RunConfig cfg;
    if (!fl.preset.empty()) {
        cfg = vs::config_from_preset(fl.preset);
        cfg.provenance.push_back("preset=" + fl.preset);
        if (!fl.config.empty()) {
            json j = load_json_file(fl.config);
            if (j.is_object() && j.contains("preset") &&
                j["preset"].get<std::string>() != fl.preset)
                throw vs::ConfigError("--preset disagrees with config file preset");
            vs::apply_config_json(cfg, j);
            cfg.provenance.push_back("config=" + fl.config);
        }
    } else if (!fl.config.empty()) {
        cfg = vs::parse_config_file(fl.config);
    }
    if (!fl.out.empty()) {
        cfg.out_dir = fl.out;
        cfg.provenance.push_back("out=" + fl.out);
    }
    if (fl.grid > 0) {
        cfg.grid.nx = cfg.grid.ny = cfg.grid.nz = fl.grid;
        cfg.provenance.push_back("grid=" + std::to_string(fl.grid));
    }
    if (fl.dt > 0) {
        cfg.integrator.dt = fl.dt;
        cfg.provenance.push_back("dt=" + std::to_string(fl.dt));
    }
    if (fl.max_steps >= 0) {
        cfg.stopping.max_steps = fl.max_steps;
        cfg.provenance.push_back("max_steps=" + std::to_string(fl.max_steps));
    }
    if (!fl.scheme.empty()) {
        cfg.integrator.scheme = vs::scheme_from_name(fl.scheme);
        cfg.provenance.push_back("scheme=" + fl.scheme);
    }
    if (fl.snapshot_every >= 0) cfg.snapshot_every = fl.snapshot_every;
    if (fl.diag_every >= 0) cfg.diag_every = fl.diag_every;
    if (fl.checkpoint_every >= 0) cfg.checkpoint_every = fl.checkpoint_every;
    if (!fl.formats.empty()) cfg.formats = fl.formats;
    for (const auto& kv : fl.sets) vs::apply_set_override(cfg, kv);
    if (cfg.init.epsilon == 0) cfg.init.epsilon = cfg.params.epsilon;
    cfg.validate();
    return cfg;
}

void write_manifest(const vs::RunConfig& cfg, const vs::RunResult* res, double wall_s,
                    long start_step, const std::string& status) {
    json j;
    j["version"] = vs::version_string;
    j["config"] = vs::config_to_json(cfg);
    j["threads"] = thread_count_from_env();
    j["status"] = status;
    j["start_step"] = start_step;
    if (res) {
        j["converged"] = res->converged;
        j["steps"] = start_step + res->steps_taken;
        j["wall_clock_s"] = wall_s;
        if (!res->history.empty()) {
            const auto& e = res->history.back().energy;
            j["final"] = {{"E_M", e.E_M}, {"V", e.V}, {"A", e.A}, {"dA", e.dA}};
        }
    }
    std::ofstream os(std::filesystem::path(cfg.out_dir) / "manifest.json", std::ios::trunc);
    if (!os) throw vs::IoError("cannot write manifest in " + cfg.out_dir);
    os << j.dump(2) << "\n";
}

int execute(const vs::RunConfig& cfg) {
    std::filesystem::path out(cfg.out_dir);
    std::filesystem::create_directories(out);

    vs::Field phi0(cfg.grid);
    long start_step = 0;
    if (!cfg.resume_from.empty()) {
        vs::CheckpointData ck = vs::read_checkpoint(cfg.resume_from);
        if (!(ck.phi.grid == cfg.grid))
            throw vs::ConfigError("checkpoint grid does not match configured grid");
        phi0 = std::move(ck.phi);
        start_step = ck.step;
    } else {
        phi0 = vs::tanh_ellipsoid(cfg.init, cfg.grid);
    }

    write_manifest(cfg, nullptr, 0, start_step, "running");

    vs::DiagnosticsWriter diag(out / "diagnostics.csv");
    vs::StoppingCriterion stop = cfg.stopping;
    stop.max_steps = std::max<long>(1, cfg.stopping.max_steps - start_step);

    const double dt = cfg.integrator.dt;
    auto on_row = [&](const vs::DiagnosticsRow& row) {
        vs::DiagnosticsRow abs = row;
        abs.step += start_step;
        abs.time = abs.step * dt;
        diag.write(abs);
        diag.flush();
    };
    auto per_step = [&](long rel_step, const vs::Field& phi) {
        long step = start_step + rel_step;
        if (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) {
            char name[64];
            std::snprintf(name, sizeof name, "snapshot_%08ld", step);
            vs::write_snapshot(out, name, phi, {step, step * dt}, cfg.formats);
        }
        if (cfg.checkpoint_every > 0 && step % cfg.checkpoint_every == 0)
            vs::write_checkpoint(out / "checkpoint", phi, step, step * dt);
    };

    auto t0 = std::chrono::steady_clock::now();
    vs::RunResult res =
        vs::run_to_steady_state(phi0, cfg.params, cfg.integrator, stop,
                                int(std::min<long>(cfg.diag_every, INT32_MAX)), on_row, per_step);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    long final_step = start_step + res.steps_taken;
    vs::write_snapshot(out, "final", res.phi, {final_step, final_step * dt}, cfg.formats);
    vs::write_checkpoint(out / "checkpoint", res.phi, final_step, final_step * dt);
    write_manifest(cfg, &res, wall, start_step, "done");

    std::cout << "steps=" << final_step << " converged=" << (res.converged ? "yes" : "no")
              << " E_M=" << res.history.back().energy.E_M << " out=" << cfg.out_dir << "\n";
    return 0;
}

int cmd_presets() {
    ordered_json arr = ordered_json::array();
    for (const auto& name : vs::preset_names()) {
        const vs::ExperimentPreset& p = vs::preset(name);
        vs::ModelParams rp = p.params.resolved();
        ordered_json r;
        r["name"] = p.name;
        r["expected_shape"] = p.expected_shape;
        r["grid"] = {{"nx", p.domain.nx}, {"ny", p.domain.ny}, {"nz", p.domain.nz},
                     {"lx", p.domain.lx}, {"ly", p.domain.ly}, {"lz", p.domain.lz}};
        r["params"] = {{"epsilon", rp.epsilon}, {"kappa", rp.kappa},
                       {"kappa_bar", rp.kappa_bar}, {"M1", rp.M1}, {"M2", rp.M2},
                       {"C", rp.C}, {"D", rp.D}, {"A0", rp.A0}, {"alpha", rp.alpha},
                       {"beta", rp.beta}, {"dA0", rp.dA0}};
        r["init"] = {{"center", p.init.center}, {"divisors", p.init.divisors},
                     {"R", p.init.R}, {"epsilon", p.init.epsilon}};
        r["integrator"] = {{"scheme", vs::scheme_name(p.integrator.scheme)},
                           {"dt", p.integrator.dt}};
        r["varied"] = {{"alpha", p.varied.alpha}, {"beta", p.varied.beta},
                       {"dA0", p.varied.dA0}};
        r["notes"] = p.notes;
        arr.push_back(std::move(r));
    }
    std::cout << arr.dump(2) << "\n";
    return 0;
}


std::string sci(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.3e", v);
    return b;
}

struct VerifyRow {
    std::string name;
    bool pass = false;
    std::string detail;
};

vs::Field smooth_random_field(const vs::GridSpec& g, unsigned seed, double amp = 0.4) {
    // band-limited random data: a handful of low modes with seeded phases
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(0, 2 * M_PI);
    struct Mode { int a, b, c; double ph, w; };
    std::vector<Mode> modes;
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b)
            for (int c = -2; c <= 2; ++c) {
                if (a == 0 && b == 0 && c == 0) continue;
                modes.push_back({a, b, c, uni(rng), 1.0 / (1 + a * a + b * b + c * c)});
            }
    vs::Field f(g);
    double peak = 0;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double x = 2 * M_PI * i / g.nx, y = 2 * M_PI * j / g.ny,
                       z = 2 * M_PI * k / g.nz;
                double v = 0;
                for (const auto& m : modes) v += m.w * std::cos(m.a * x + m.b * y + m.c * z + m.ph);
                f.values[f.index(i, j, k)] = v;
                peak = std::max(peak, std::abs(v));
            }
    for (double& v : f.values) v *= amp / peak;
    return f;
}

int cmd_verify(const std::string& report_path) {
    std::vector<VerifyRow> rows;
    auto add = [&](const std::string& name, bool pass, const std::string& detail) {
        rows.push_back({name, pass, detail});
        std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    };

    {  // spectral operators are exact on plane waves
        vs::GridSpec g = vs::cube_grid(16);
        vs::Field f(g);
        double k1 = 2 * M_PI * 3, k2 = 2 * M_PI * 2, k3 = 2 * M_PI * 1;
        for (int k = 0; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    f.values[f.index(i, j, k)] =
                        std::sin(k1 * i / g.nx + k2 * j / g.ny + k3 * k / g.nz);
        double ksq = k1 * k1 + k2 * k2 + k3 * k3;
        vs::Field lap = vs::laplacian(f);
        double err = 0;
        for (std::size_t s = 0; s < f.values.size(); ++s)
            err = std::max(err, std::abs(lap.values[s] + ksq * f.values[s]) / ksq);
        add("spectral_plane_wave", err <= 1e-11, "rel err " + sci(err));
    }

    vs::ModelParams p;
    p.epsilon = 0.15;
    p.M1 = 100;
    p.M2 = 100;
    p.alpha = 0.5;
    p.beta = 0.6;
    p.dA0 = 0.05;

    {  // variational derivative vs central finite difference
        vs::GridSpec g = vs::cube_grid(16);
        vs::Field phi = smooth_random_field(g, 11);
        vs::Field psi = smooth_random_field(g, 23);
        double fd = vs::fd_directional_derivative(phi, psi, p, 1e-5);
        vs::Field vd = vs::variational_derivative(phi, p.resolved());
        vs::Field prod(g);
        for (std::size_t s = 0; s < prod.values.size(); ++s)
            prod.values[s] = vd.values[s] * psi.values[s];
        double an = vs::integrate(prod);
        double rel = std::abs(fd - an) / std::max(1.0, std::abs(an));
        add("fd_gradient_check", rel <= 1e-6, "rel err " + sci(rel));
    }

    {  // sphere functionals approach sharp-interface references as eps shrinks
        vs::GridSpec g = vs::cube_grid(64);
        vs::ModelParams ps;
        auto errs = [&](double eps) {
            ps.epsilon = eps;
            vs::ModelParams rp = ps.resolved();
            vs::Field f = vs::tanh_sphere({0.5, 0.5, 0.5}, 0.25, eps, g);
            vs::SphereReference ref = vs::sphere_reference(0.25, rp);
            auto [B, A] = vs::gl_B_and_area_A(f, rp);
            return std::abs(A - ref.A) / ref.A;
        };
        double e1 = errs(0.06), e2 = errs(0.03);
        bool pass = e1 / std::max(e2, 1e-300) >= 1.5;
        add("sphere_area_refinement", pass,
            "area err " + sci(e1) + " -> " + sci(e2));
    }

    {  // discrete energy law of the fully implicit scheme
        vs::GridSpec g = vs::cube_grid(16);
        vs::Field phi = smooth_random_field(g, 7);
        vs::IntegratorConfig ic;
        ic.scheme = vs::Scheme::fully_implicit;
        ic.dt = 1e-5;
        ic.picard_tol = 1e-12;
        double worst = 0, scale = 1;
        for (int n = 0; n < 3; ++n) {
            vs::Field next = vs::step_fully_implicit(phi, p, ic.dt, ic);
            double r = std::abs(vs::energy_law_residual(phi, next, p, ic.dt));
            scale = std::max(1.0, vs::total_energy(phi, p.resolved()).E_M);
            worst = std::max(worst, r / scale);
            phi = std::move(next);
        }
        add("energy_law_fully_implicit", worst <= 1e-8,
            "max |residual|/max(1,E) = " + sci(worst));
    }

    {  // backward Euler one-sided energy inequality
        vs::GridSpec g = vs::cube_grid(16);
        vs::Field phi = smooth_random_field(g, 7);
        vs::IntegratorConfig ic;
        ic.scheme = vs::Scheme::backward_euler;
        ic.dt = 1e-5;
        ic.picard_tol = 1e-12;
        bool ok = true;
        std::string detail = "3 steps within slack";
        try {
            for (int n = 0; n < 3; ++n) phi = vs::step_backward_euler(phi, p, ic.dt, ic);
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        add("energy_inequality_backward_euler", ok, detail);
    }

    {  // shape probe on a uniform field
        vs::GridSpec g = vs::cube_grid(8);
        vs::Field one(g);
        std::fill(one.values.begin(), one.values.end(), 1.0);
        vs::ShapeProbeResult r = vs::shape_probe(one, vs::standard_probes(g));
        bool pass = r.positive_components == 1 && r.negative_components == 0;
        add("shape_probe_uniform", pass,
            "components +" + std::to_string(r.positive_components) + " / -" +
                std::to_string(r.negative_components));
    }

    {  // bitwise determinism of a short run
        auto run_once = [&]() {
            vs::RunConfig cfg = vs::config_from_preset("discocyte");
            cfg.grid = vs::cube_grid(16);
            cfg.stopping.max_steps = 5;
            vs::Field f0 = vs::tanh_ellipsoid(cfg.init, cfg.grid);
            vs::RunResult r = vs::run_to_steady_state(f0, cfg.params, cfg.integrator,
                                                      cfg.stopping, 5);
            return r.history.back().energy.E_M;
        };
        double a = run_once(), b = run_once();
        bool pass = std::memcmp(&a, &b, sizeof a) == 0;
        add("determinism_short_run", pass, pass ? "bit-identical E_M" : "E_M bits differ");
    }

    json rep = json::array();
    bool all = true;
    for (const auto& r : rows) {
        rep.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        all = all && r.pass;
    }
    std::ofstream os(report_path, std::ios::trunc);
    if (!os) throw vs::IoError("cannot write report: " + report_path);
    os << rep.dump(2) << "\n";
    std::cout << (all ? "verify: all checks passed\n" : "verify: FAILURES present\n");
    return all ? 0 : 1;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"phase-field vesicle relaxation (bending + area-difference elasticity)"};
    app.require_subcommand(1);

    RunFlags fl;
    CLI::App* run = app.add_subcommand("run", "run a scenario to steady state");
    run->add_option("--preset", fl.preset, "catalog preset name");
    run->add_option("--config", fl.config, "JSON config file");
    run->add_option("--out", fl.out, "output directory");
    run->add_option("--grid", fl.grid, "override cubic grid size N");
    run->add_option("--dt", fl.dt, "override time step");
    run->add_option("--max-steps", fl.max_steps, "override step budget");
    run->add_option("--scheme", fl.scheme,
                    "forward_euler | semi_implicit | fully_implicit | backward_euler");
    run->add_option("--snapshot-every", fl.snapshot_every, "snapshot cadence (0 = final only)");
    run->add_option("--diag-every", fl.diag_every, "diagnostics cadence");
    run->add_option("--checkpoint-every", fl.checkpoint_every, "checkpoint cadence (0 = none)");
    run->add_option("--format", fl.formats, "snapshot formats: raw, vti");
    run->add_option("--set", fl.sets, "dotted-path override, e.g. params.dA0=0.2");

    CLI::App* presets = app.add_subcommand("presets", "dump the experiment catalog");

    std::string report_path = "verify_report.json";
    CLI::App* verify = app.add_subcommand("verify", "run the fast oracle suite");
    verify->add_option("--report", report_path, "where to write the JSON report");

    std::string resume_from, resume_out;
    long resume_max_steps = -1;
    CLI::App* resume = app.add_subcommand("resume", "continue a checkpointed run");
    resume->add_option("--from", resume_from, "run directory containing manifest + checkpoint")
        ->required();
    resume->add_option("--out", resume_out, "output directory (default: same as --from)");
    resume->add_option("--max-steps", resume_max_steps, "override total step budget");

    CLI11_PARSE(app, argc, argv);

    if (*presets) return cmd_presets();
    if (*verify) return cmd_verify(report_path);
    if (*run) {
        vs::RunConfig cfg = build_config(fl);
        return execute(cfg);
    }
    if (*resume) {
        std::ifstream is(std::filesystem::path(resume_from) / "manifest.json");
        if (!is) throw vs::ConfigError("no manifest.json under " + resume_from);
        json m;
        try {
            is >> m;
        } catch (const json::exception& e) {
            throw vs::ConfigError("bad manifest: " + std::string(e.what()));
        }
        vs::RunConfig cfg;
        json stored = m.at("config");
        stored.erase("provenance");  // output record, not an input knob
        vs::apply_config_json(cfg, stored);
        if (stored.contains("preset"))
            cfg.preset_name = stored["preset"].get<std::string>();
        cfg.provenance = {"resume_from=" + resume_from};
        cfg.resume_from = (std::filesystem::path(resume_from) / "checkpoint").string();
        cfg.out_dir = resume_out.empty() ? resume_from : resume_out;
        if (resume_max_steps >= 0) cfg.stopping.max_steps = resume_max_steps;
        if (cfg.init.epsilon == 0) cfg.init.epsilon = cfg.params.epsilon;
        cfg.validate();
        return execute(cfg);
    }
    return 2;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const vs::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const vs::UnknownPreset& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const vs::NonPositiveSymbol& e) {
        std::cerr << "admissibility error: " << e.what() << "\n";
        return 3;
    } catch (const vs::PicardDiverged& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 4;
    } catch (const vs::EnergyInequalityViolated& e) {
        std::cerr << "scheme error: " << e.what() << "\n";
        return 5;
    } catch (const vs::NonFinite& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 6;
    } catch (const vs::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 7;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
