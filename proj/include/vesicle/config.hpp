#pragma once

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "vesicle/scenario.hpp"

namespace vesicle {

/** Everything a run needs; built from a preset, a config file, flags, or any mix. */
struct RunConfig {
    std::string preset_name;  // empty for fully inline scenarios
    GridSpec grid = cube_grid(64);
    ModelParams params;
    EllipsoidSpec init;
    IntegratorConfig integrator;
    StoppingCriterion stopping;
    std::string out_dir = "run";
    long snapshot_every = 0;    // 0 = final snapshot only
    long diag_every = 100;
    long checkpoint_every = 0;  // 0 = no checkpoints
    std::vector<std::string> formats{"raw"};
    std::string resume_from;
    std::vector<std::string> provenance;  // override strings, in application order

    void validate() const {
        grid.validate();
        ModelParams rp = params.resolved();
        rp.validate();
        init.validate(grid);
        integrator.validate();
        stopping.validate();
        if (diag_every < 1) throw ConfigError("diag_every: must be >= 1");
        if (snapshot_every < 0) throw ConfigError("snapshot_every: must be >= 0 (0 disables)");
        if (checkpoint_every < 0)
            throw ConfigError("checkpoint_every: must be >= 0 (0 disables)");
        if (out_dir.empty()) throw ConfigError("out: output directory must be set");
        if (formats.empty()) throw ConfigError("formats: need at least one of raw, vti");
        for (const auto& f : formats)
            if (f != "raw" && f != "vti") throw ConfigError("formats: unknown format '" + f + "'");
    }
};

namespace detail {

[[noreturn]] inline void bad_key(const std::string& path, const std::string& why) {
    throw ConfigError(path + ": " + why);
}

template <typename T>
T get_as(const nlohmann::json& v, const std::string& path) {
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception& e) {
        bad_key(path, std::string("wrong type (") + e.what() + ")");
    }
}

inline void apply_grid(GridSpec& g, const nlohmann::json& j, const std::string& prefix) {
    for (const auto& [key, val] : j.items()) {
        std::string path = prefix + "." + key;
        if (key == "n") {
            int n = get_as<int>(val, path);
            g.nx = g.ny = g.nz = n;
        } else if (key == "nx") g.nx = get_as<int>(val, path);
        else if (key == "ny") g.ny = get_as<int>(val, path);
        else if (key == "nz") g.nz = get_as<int>(val, path);
        else if (key == "lx") g.lx = get_as<double>(val, path);
        else if (key == "ly") g.ly = get_as<double>(val, path);
        else if (key == "lz") g.lz = get_as<double>(val, path);
        else if (key == "l") {
            double L = get_as<double>(val, path);
            g.lx = g.ly = g.lz = L;
        } else bad_key(path, "unknown key");
    }
}

inline void apply_params(ModelParams& p, const nlohmann::json& j, const std::string& prefix) {
    for (const auto& [key, val] : j.items()) {
        std::string path = prefix + "." + key;
        double* slot = key == "epsilon" ? &p.epsilon
                     : key == "kappa" ? &p.kappa
                     : key == "kappa_bar" ? &p.kappa_bar
                     : key == "M1" ? &p.M1
                     : key == "M2" ? &p.M2
                     : key == "C" ? &p.C
                     : key == "D" ? &p.D
                     : key == "A0" ? &p.A0
                     : key == "alpha" ? &p.alpha
                     : key == "beta" ? &p.beta
                     : key == "dA0" ? &p.dA0
                     : nullptr;
        if (!slot) bad_key(path, "unknown key");
        *slot = get_as<double>(val, path);
    }
}

inline void apply_init(EllipsoidSpec& s, const nlohmann::json& j, const std::string& prefix) {
    for (const auto& [key, val] : j.items()) {
        std::string path = prefix + "." + key;
        if (key == "center" || key == "divisors") {
            auto v = get_as<std::vector<double>>(val, path);
            if (v.size() != 3) bad_key(path, "need exactly 3 values");
            auto& dst = key == "center" ? s.center : s.divisors;
            std::copy(v.begin(), v.end(), dst.begin());
        } else if (key == "R") s.R = get_as<double>(val, path);
        else if (key == "epsilon") s.epsilon = get_as<double>(val, path);
        else bad_key(path, "unknown key");
    }
}

inline void apply_integrator(IntegratorConfig& c, const nlohmann::json& j,
                             const std::string& prefix) {
    for (const auto& [key, val] : j.items()) {
        std::string path = prefix + "." + key;
        if (key == "scheme") {
            try {
                c.scheme = scheme_from_name(get_as<std::string>(val, path));
            } catch (const std::invalid_argument& e) {
                bad_key(path, e.what());
            }
        } else if (key == "dt") c.dt = get_as<double>(val, path);
        else if (key == "picard_tol") c.picard_tol = get_as<double>(val, path);
        else if (key == "picard_max_iters") c.picard_max_iters = get_as<int>(val, path);
        else bad_key(path, "unknown key");
    }
}

inline void apply_stopping(StoppingCriterion& s, const nlohmann::json& j,
                           const std::string& prefix) {
    for (const auto& [key, val] : j.items()) {
        std::string path = prefix + "." + key;
        if (key == "max_steps") s.max_steps = get_as<long>(val, path);
        else if (key == "rate_tol") s.rate_tol = get_as<double>(val, path);
        else if (key == "energy_tol") s.energy_tol = get_as<double>(val, path);
        else bad_key(path, "unknown key");
    }
}

} // namespace detail

/** Seed a RunConfig from a catalog preset. */
inline RunConfig config_from_preset(const std::string& name) {
    const ExperimentPreset& pr = preset(name);
    RunConfig cfg;
    cfg.preset_name = pr.name;
    cfg.grid = pr.domain;
    cfg.params = pr.params;
    cfg.init = pr.init;
    cfg.integrator = pr.integrator;
    return cfg;
}

/** Apply a JSON object onto cfg; unknown keys are rejected with their path. */
inline void apply_config_json(RunConfig& cfg, const nlohmann::json& j,
                              const std::string& prefix = "") {
    if (!j.is_object()) throw ConfigError(prefix.empty() ? "config: not an object" : prefix);
    for (const auto& [key, val] : j.items()) {
        std::string path = prefix.empty() ? key : prefix + "." + key;
        if (key == "preset") {
            // handled by the caller before any other key; accept and ignore here
            detail::get_as<std::string>(val, path);
        } else if (key == "grid") detail::apply_grid(cfg.grid, val, path);
        else if (key == "params") detail::apply_params(cfg.params, val, path);
        else if (key == "init") detail::apply_init(cfg.init, val, path);
        else if (key == "integrator") detail::apply_integrator(cfg.integrator, val, path);
        else if (key == "stopping") detail::apply_stopping(cfg.stopping, val, path);
        else if (key == "out") cfg.out_dir = detail::get_as<std::string>(val, path);
        else if (key == "snapshot_every") cfg.snapshot_every = detail::get_as<long>(val, path);
        else if (key == "diag_every") cfg.diag_every = detail::get_as<long>(val, path);
        else if (key == "checkpoint_every")
            cfg.checkpoint_every = detail::get_as<long>(val, path);
        else if (key == "formats")
            cfg.formats = detail::get_as<std::vector<std::string>>(val, path);
        else if (key == "resume") cfg.resume_from = detail::get_as<std::string>(val, path);
        else detail::bad_key(path, "unknown key");
    }
}

/** Parse a JSON config file. A "preset" key seeds the config before other keys apply. */
inline RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path.string() + ": " + e.what());
    }
    RunConfig cfg;
    if (j.is_object() && j.contains("preset"))
        cfg = config_from_preset(detail::get_as<std::string>(j["preset"], "preset"));
    apply_config_json(cfg, j);
    cfg.provenance.push_back("config=" + path.string());
    return cfg;
}

/** Apply one dotted-path override, e.g. "params.dA0=0.2" or "grid.n=32". */
inline void apply_set_override(RunConfig& cfg, const std::string& kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set expects key=value, got '" + kv + "'");
    std::string dotted = kv.substr(0, eq);
    std::string raw = kv.substr(eq + 1);
    nlohmann::json value;
    try {
        value = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception&) {
        value = raw;  // unquoted strings (e.g. scheme names) arrive as plain text
    }
    // build a nested single-key object from the dotted path
    nlohmann::json obj = value;
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        auto dot = dotted.find('.', pos);
        parts.push_back(dotted.substr(pos, dot == std::string::npos ? dot : dot - pos));
        if (dot == std::string::npos) break;
        pos = dot + 1;
    }
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        if (it->empty()) throw ConfigError("--set: empty path segment in '" + dotted + "'");
        nlohmann::json wrap;
        wrap[*it] = std::move(obj);
        obj = std::move(wrap);
    }
    apply_config_json(cfg, obj);
    cfg.provenance.push_back("set:" + kv);
}

/** Full resolved dump for the run manifest. */
inline nlohmann::json config_to_json(const RunConfig& cfg) {
    ModelParams rp = cfg.params.resolved();
    nlohmann::json j;
    j["preset"] = cfg.preset_name;
    j["grid"] = {{"nx", cfg.grid.nx}, {"ny", cfg.grid.ny}, {"nz", cfg.grid.nz},
                 {"lx", cfg.grid.lx}, {"ly", cfg.grid.ly}, {"lz", cfg.grid.lz}};
    j["params"] = {{"epsilon", rp.epsilon}, {"kappa", rp.kappa}, {"kappa_bar", rp.kappa_bar},
                   {"M1", rp.M1},           {"M2", rp.M2},       {"C", rp.C},
                   {"D", rp.D},             {"A0", rp.A0},       {"alpha", rp.alpha},
                   {"beta", rp.beta},       {"dA0", rp.dA0}};
    j["init"] = {{"center", cfg.init.center},
                 {"divisors", cfg.init.divisors},
                 {"R", cfg.init.R},
                 {"epsilon", cfg.init.epsilon}};
    j["integrator"] = {{"scheme", scheme_name(cfg.integrator.scheme)},
                       {"dt", cfg.integrator.dt},
                       {"picard_tol", cfg.integrator.picard_tol},
                       {"picard_max_iters", cfg.integrator.picard_max_iters}};
    j["stopping"] = {{"max_steps", cfg.stopping.max_steps},
                     {"rate_tol", cfg.stopping.rate_tol},
                     {"energy_tol", cfg.stopping.energy_tol}};
    j["out"] = cfg.out_dir;
    j["snapshot_every"] = cfg.snapshot_every;
    j["diag_every"] = cfg.diag_every;
    j["checkpoint_every"] = cfg.checkpoint_every;
    j["formats"] = cfg.formats;
    j["resume"] = cfg.resume_from;
    j["provenance"] = cfg.provenance;
    return j;
}

} // namespace vesicle
