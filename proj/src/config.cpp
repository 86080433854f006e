#include "qsweep/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace qsweep {

using nlohmann::json;

namespace {

void require_keys_known(const json& obj, const std::string& path,
                        const std::set<std::string>& known) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!known.count(key)) {
            throw ConfigError("unknown key '" + path + key + "' (strict schema)");
        }
    }
}

const json& require(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError("missing required key '" + path + key + "'");
    return *it;
}

double require_number(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (!v.is_number()) throw ConfigError("'" + path + key + "' must be a number");
    return v.get<double>();
}

double optional_number(const json& obj, const std::string& path, const char* key,
                       double fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number()) throw ConfigError("'" + path + key + "' must be a number");
    return it->get<double>();
}

long optional_integer(const json& obj, const std::string& path, const char* key,
                      long fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number_integer()) throw ConfigError("'" + path + key + "' must be an integer");
    return it->get<long>();
}

std::string require_string(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (!v.is_string()) throw ConfigError("'" + path + key + "' must be a string");
    return v.get<std::string>();
}

} // namespace

ExperimentSetup RunConfig::make_setup() const {
    try {
        return build_setup(particle_mass_kg, wavelength_m, slit_separation_m,
                           slit_width_sigma_m, forward_screen_distance_m,
                           sideways_screen_x_m);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("setup: ") + e.what());
    }
}

IntegratorConfig RunConfig::make_integrator_config(const ExperimentSetup& setup) const {
    IntegratorConfig ic;
    ic.rel_tol = trajectories.rel_tol;
    ic.abs_tol = trajectories.abs_tol_sigma;
    ic.max_step = trajectories.max_step_tau;
    ic.max_time = trajectories.max_time_over_screen * setup.screen_time_internal();
    ic.density_floor = trajectories.density_floor;
    ic.node_stall_limit = trajectories.node_stall_limit;
    return ic;
}

PacketParams RunConfig::slit1_packet() const {
    PacketParams p;
    p.center = -0.5 * slit_separation_m / slit_width_sigma_m;
    return p;
}

PacketParams RunConfig::slit2_packet() const {
    PacketParams p;
    p.center = +0.5 * slit_separation_m / slit_width_sigma_m;
    return p;
}

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object");

    require_keys_known(doc, "", {"schema_version", "setup", "attenuation", "coherence",
                                 "trajectories", "screens", "profile"});

    RunConfig cfg;
    const json& ver = require(doc, "", "schema_version");
    if (!ver.is_number_integer()) throw ConfigError("'schema_version' must be an integer");
    cfg.schema_version = ver.get<int>();
    if (cfg.schema_version != k_config_schema_version) {
        throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version) +
                          " (this build supports " + std::to_string(k_config_schema_version) + ")");
    }

    const json& setup = require(doc, "", "setup");
    if (!setup.is_object()) throw ConfigError("'setup' must be an object");
    require_keys_known(setup, "setup.",
                       {"particle_mass_kg", "wavelength_m", "slit_separation_m",
                        "slit_width_sigma_m", "forward_screen_distance_m",
                        "sideways_screen_x_m"});
    cfg.particle_mass_kg = require_number(setup, "setup.", "particle_mass_kg");
    cfg.wavelength_m = require_number(setup, "setup.", "wavelength_m");
    cfg.slit_separation_m = require_number(setup, "setup.", "slit_separation_m");
    cfg.slit_width_sigma_m = require_number(setup, "setup.", "slit_width_sigma_m");
    cfg.forward_screen_distance_m = require_number(setup, "setup.", "forward_screen_distance_m");
    if (setup.contains("sideways_screen_x_m")) {
        const json& sx = setup["sideways_screen_x_m"];
        if (sx.is_null()) {
            cfg.sideways_screen_x_m.reset();
        } else if (sx.is_number()) {
            cfg.sideways_screen_x_m = sx.get<double>();
        } else {
            throw ConfigError("'setup.sideways_screen_x_m' must be a number or null");
        }
    }

    const json& att = require(doc, "", "attenuation");
    if (!att.is_object()) throw ConfigError("'attenuation' must be an object");
    require_keys_known(att, "attenuation.", {"mode", "a", "a_list"});
    const std::string mode = require_string(att, "attenuation.", "mode");
    if (mode == "none") cfg.attenuation_kind = AttenuationKind::None;
    else if (mode == "stochastic") cfg.attenuation_kind = AttenuationKind::Stochastic;
    else if (mode == "deterministic") cfg.attenuation_kind = AttenuationKind::Deterministic;
    else if (mode == "both") { cfg.attenuation_kind = AttenuationKind::Stochastic; cfg.both_attenuation_modes = true; }
    else throw ConfigError("'attenuation.mode' must be one of none|stochastic|deterministic|both");

    const bool has_a = att.contains("a");
    const bool has_list = att.contains("a_list");
    if (cfg.attenuation_kind == AttenuationKind::None && !cfg.both_attenuation_modes) {
        if (has_a || has_list) {
            throw ConfigError("'attenuation.a' is not accepted with mode none");
        }
        cfg.a_values = {1.0};
    } else {
        if (has_a == has_list) {
            throw ConfigError("attenuation requires exactly one of 'a' or 'a_list'");
        }
        if (has_a) {
            cfg.a_values = {require_number(att, "attenuation.", "a")};
        } else {
            const json& list = att["a_list"];
            if (!list.is_array() || list.empty()) {
                throw ConfigError("'attenuation.a_list' must be a nonempty array");
            }
            for (const json& v : list) {
                if (!v.is_number()) throw ConfigError("'attenuation.a_list' entries must be numbers");
                cfg.a_values.push_back(v.get<double>());
            }
        }
        for (double a : cfg.a_values) {
            if (!(a >= 0.0 && a <= 1.0)) {
                throw ConfigError("'attenuation' transmission factors must be in [0, 1]");
            }
        }
    }

    const std::string coh = require_string(doc, "", "coherence");
    if (coh == "coherent") cfg.coherence = CoherenceMode::Coherent;
    else if (coh == "incoherent") cfg.coherence = CoherenceMode::Incoherent;
    else throw ConfigError("'coherence' must be coherent|incoherent");

    if (doc.contains("trajectories")) {
        const json& tr = doc["trajectories"];
        if (!tr.is_object()) throw ConfigError("'trajectories' must be an object");
        require_keys_known(tr, "trajectories.",
                           {"n_per_slit", "sampler", "seed", "rel_tol", "abs_tol_sigma",
                            "max_step_tau", "max_time_over_screen", "density_floor",
                            "node_stall_limit"});
        TrajectorySettings& t = cfg.trajectories;
        t.n_per_slit = static_cast<int>(optional_integer(tr, "trajectories.", "n_per_slit",
                                                         t.n_per_slit));
        if (t.n_per_slit < 1) throw ConfigError("'trajectories.n_per_slit' must be >= 1");
        if (tr.contains("sampler")) {
            const std::string s = require_string(tr, "trajectories.", "sampler");
            if (s == "quantile") t.sampler = LaunchSampler::Quantile;
            else if (s == "random") t.sampler = LaunchSampler::Random;
            else throw ConfigError("'trajectories.sampler' must be quantile|random");
        }
        t.seed = static_cast<std::uint64_t>(optional_integer(tr, "trajectories.", "seed", 0));
        t.rel_tol = optional_number(tr, "trajectories.", "rel_tol", t.rel_tol);
        t.abs_tol_sigma = optional_number(tr, "trajectories.", "abs_tol_sigma", t.abs_tol_sigma);
        t.max_step_tau = optional_number(tr, "trajectories.", "max_step_tau", t.max_step_tau);
        t.max_time_over_screen = optional_number(tr, "trajectories.", "max_time_over_screen",
                                                 t.max_time_over_screen);
        t.density_floor = optional_number(tr, "trajectories.", "density_floor", t.density_floor);
        t.node_stall_limit = static_cast<int>(optional_integer(tr, "trajectories.",
                                                               "node_stall_limit",
                                                               t.node_stall_limit));
        if (!(t.rel_tol > 0.0) || !(t.abs_tol_sigma > 0.0)) {
            throw ConfigError("'trajectories' tolerances must be positive");
        }
        if (t.max_time_over_screen < 1.0) {
            throw ConfigError("'trajectories.max_time_over_screen' must be >= 1");
        }
    }

    if (doc.contains("screens")) {
        const json& sc = doc["screens"];
        if (!sc.is_object()) throw ConfigError("'screens' must be an object");
        require_keys_known(sc, "screens.", {"forward_bins", "sideways_bins"});
        cfg.screens.forward_bins = static_cast<int>(optional_integer(sc, "screens.",
                                                                     "forward_bins",
                                                                     cfg.screens.forward_bins));
        cfg.screens.sideways_bins = static_cast<int>(optional_integer(sc, "screens.",
                                                                      "sideways_bins",
                                                                      cfg.screens.sideways_bins));
        if (cfg.screens.forward_bins < 1 || cfg.screens.sideways_bins < 1) {
            throw ConfigError("'screens' bin counts must be >= 1");
        }
    }

    if (doc.contains("profile")) {
        const json& pr = doc["profile"];
        if (!pr.is_object()) throw ConfigError("'profile' must be an object");
        require_keys_known(pr, "profile.", {"grid_points", "halfwidth_sigma_t", "time_tau"});
        cfg.profile.grid_points = static_cast<int>(optional_integer(pr, "profile.",
                                                                    "grid_points",
                                                                    cfg.profile.grid_points));
        cfg.profile.halfwidth_sigma_t = optional_number(pr, "profile.", "halfwidth_sigma_t",
                                                        cfg.profile.halfwidth_sigma_t);
        if (pr.contains("time_tau")) {
            const json& tt = pr["time_tau"];
            if (!tt.is_number()) throw ConfigError("'profile.time_tau' must be a number");
            cfg.profile.time_tau = tt.get<double>();
            if (*cfg.profile.time_tau < 0.0) throw ConfigError("'profile.time_tau' must be >= 0");
        }
        if (cfg.profile.grid_points < 16) throw ConfigError("'profile.grid_points' must be >= 16");
        if (!(cfg.profile.halfwidth_sigma_t > 0.0)) {
            throw ConfigError("'profile.halfwidth_sigma_t' must be positive");
        }
    }

    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace qsweep
