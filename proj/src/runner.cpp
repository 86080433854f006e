#include "qsweep/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"

#include "qsweep/batch.hpp"
#include "qsweep/csv.hpp"
#include "qsweep/oracle.hpp"
#include "qsweep/screens.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qsweep {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_a(double a) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", a);
    return buf;
}

std::vector<double> dedup_with_warning(std::vector<double> values) {
    std::vector<double> out;
    for (double v : values) {
        if (std::find(out.begin(), out.end(), v) != out.end()) {
            std::cerr << "warning: duplicate a = " << format_a(v) << " removed from list\n";
            continue;
        }
        out.push_back(v);
    }
    return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = lo + (hi - lo) * i / (n - 1);
    return xs;
}

// Bookkeeping for one run: files written so far, removed if the run throws.
class OutputSet {
public:
    explicit OutputSet(const std::string& dir) : dir_(dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw std::runtime_error("cannot create output directory: " + dir);
    }

    std::string path(const std::string& name) {
        files_.push_back(name);
        return (fs::path(dir_) / name).string();
    }

    const std::vector<std::string>& files() const { return files_; }

    void discard_all() {
        for (const std::string& name : files_) {
            std::error_code ec;
            fs::remove(fs::path(dir_) / name, ec);
        }
    }

    std::string dir() const { return dir_; }

private:
    std::string dir_;
    std::vector<std::string> files_;
};

struct RunContext {
    RunConfig cfg;
    ExperimentSetup setup;
    PacketParams slit1;
    PacketParams slit2;
    std::vector<double> a_values;
    int threads = 0;
    std::uint64_t seed = 0;
};

RunContext make_context(const RunnerOptions& opts) {
    RunContext ctx;
    ctx.cfg = load_config(opts.config_path);
    if (opts.seed) ctx.cfg.trajectories.seed = *opts.seed;
    ctx.setup = ctx.cfg.make_setup();
    ctx.slit1 = ctx.cfg.slit1_packet();
    ctx.slit2 = ctx.cfg.slit2_packet();
    ctx.a_values = dedup_with_warning(ctx.cfg.a_values);
    ctx.threads = opts.threads;
    ctx.seed = ctx.cfg.trajectories.seed;
#ifdef _OPENMP
    if (opts.threads > 0) omp_set_num_threads(opts.threads);
#endif
    return ctx;
}

void write_setup_meta(CsvWriter& w, const RunContext& ctx) {
    const ExperimentSetup& s = ctx.setup;
    w.meta("particle_mass_kg", s.particle_mass);
    w.meta("wavelength_m", s.wavelength);
    w.meta("slit_separation_m", s.slit_separation);
    w.meta("slit_width_sigma_m", s.slit_width_sigma);
    w.meta("forward_screen_distance_m", s.forward_screen_distance);
    if (s.sideways_screen_x) w.meta("sideways_screen_x_m", *s.sideways_screen_x);
    w.meta("forward_speed_mps", s.forward_speed);
    w.meta("time_to_screen_s", s.time_to_screen);
    w.meta("tau_s", s.tau);
    w.meta("coherence", ctx.cfg.coherence == CoherenceMode::Coherent ? "coherent" : "incoherent");
}

const char* kind_name(AttenuationKind k) {
    switch (k) {
        case AttenuationKind::None: return "none";
        case AttenuationKind::Stochastic: return "stochastic";
        case AttenuationKind::Deterministic: return "deterministic";
    }
    return "?";
}

// Fields grid scan written in SI units with the stochastic weighting applied.
void write_fields_scan(const RunContext& ctx, const std::string& path, double a,
                       const std::vector<double>& times_internal,
                       const std::vector<double>& xs_internal) {
    const ExperimentSetup& s = ctx.setup;
    TwoChannelField field{ctx.slit1, apply_stochastic(ctx.slit2, a), ctx.cfg.coherence,
                          ctx.cfg.trajectories.density_floor};
    CsvWriter w(path);
    write_setup_meta(w, ctx);
    w.meta("a", a);
    w.meta("attenuation", "stochastic");
    w.meta("units", "x:m t:s P:1/m J:1/s v:m/s phi:rad");
    w.header({"x", "t", "P1", "P2", "Ptot", "Jtot", "vtot", "phi"});
    const double inv_len = 1.0 / s.length_unit;
    const double inv_tau = 1.0 / s.time_unit;
    for (double t : times_internal) {
        const std::vector<FieldSample> row = scan_fields(field, xs_internal, t, ctx.threads);
        for (std::size_t i = 0; i < xs_internal.size(); ++i) {
            const FieldSample& f = row[i];
            w.row({s.to_si_length(xs_internal[i]), s.to_si_time(t),
                   f.P1 * inv_len, f.P2 * inv_len, f.Ptot * inv_len,
                   f.Jtot * inv_tau, s.to_si_velocity(f.vtot), f.phi});
        }
    }
    w.close();
}

struct ProfileRun {
    double a = 0.0;
    AttenuationKind kind = AttenuationKind::Stochastic;
    double t_internal = 0.0;
    std::vector<double> xs;      // internal
    ProfileResult profile;
    MeasuredVisibility measured;
    Visibility theory;
};

ProfileRun evaluate_profile(const RunContext& ctx, double a, AttenuationKind kind) {
    ProfileRun run;
    run.a = a;
    run.kind = kind;
    run.t_internal = ctx.cfg.profile.time_tau.value_or(ctx.setup.screen_time_internal());

    const double sig_t = dispersed_sigma(ctx.slit1, run.t_internal);
    const double half = ctx.cfg.profile.halfwidth_sigma_t * sig_t
                      + 0.5 * ctx.setup.separation_internal();
    run.xs = linspace(-half, half, ctx.cfg.profile.grid_points);

    const AttenuationMode mode = make_attenuation(kind, a);
    run.profile = analytic_profile(ctx.slit1, ctx.slit2, mode, ctx.cfg.coherence,
                                   run.t_internal, run.xs);
    if (run.profile.narrow_grid_warning) {
        std::cerr << "warning: profile grid captures only "
                  << run.profile.mass_fraction * 100.0 << "% of the mass (a = "
                  << format_a(a) << ", " << kind_name(kind) << ")\n";
    }

    const double window = equal_envelope_halfwidth(ctx.slit1, ctx.slit2, run.t_internal);
    const double center = 0.5 * (ctx.slit1.center + ctx.slit2.center);
    run.measured = extract_visibility(run.xs, run.profile.intensity, center, window);
    run.theory = theoretical_visibility(a, kind);
    return run;
}

void write_profile_csv(const RunContext& ctx, const std::string& path, const ProfileRun& run) {
    const ExperimentSetup& s = ctx.setup;
    CsvWriter w(path);
    write_setup_meta(w, ctx);
    w.meta("a", run.a);
    w.meta("attenuation", kind_name(run.kind));
    w.meta("time_s", s.to_si_time(run.t_internal));
    w.meta("mass_fraction", run.profile.mass_fraction);
    w.meta("units", "x:m intensity:1/m (unit area over grid)");
    w.header({"x", "intensity"});
    const double inv_len = 1.0 / s.length_unit;
    for (std::size_t i = 0; i < run.xs.size(); ++i) {
        w.row({s.to_si_length(run.xs[i]), run.profile.intensity[i] * inv_len});
    }
    w.close();
}

struct TrajectoryRun {
    double a = 0.0;
    std::vector<Trajectory> trajectories;
    ScreenRecord forward;
    ScreenRecord sideways;
    bool has_sideways = false;
    long crossings = 0;
    SweeperMetrics sweeper;
};

TrajectoryRun run_trajectory_batch(const RunContext& ctx, double a) {
    TrajectoryRun run;
    run.a = a;
    TwoChannelField field{ctx.slit1, apply_stochastic(ctx.slit2, a), ctx.cfg.coherence,
                          ctx.cfg.trajectories.density_floor};
    const ScreenGeometry geom = screen_geometry(ctx.setup);
    const IntegratorConfig ic = ctx.cfg.make_integrator_config(ctx.setup);

    std::vector<LaunchPoint> launches = launch_positions(
        ctx.slit1, ctx.slit2, ctx.cfg.trajectories.n_per_slit,
        ctx.cfg.trajectories.sampler, ctx.seed);
    std::stable_sort(launches.begin(), launches.end(),
                     [](const LaunchPoint& l, const LaunchPoint& r) {
                         if (l.slit != r.slit) return static_cast<int>(l.slit) < static_cast<int>(r.slit);
                         return l.x0 < r.x0;
                     });

    run.trajectories = integrate_batch(launches, field, geom, ic, ctx.threads);
    run.crossings = count_midline_crossings(run.trajectories, ctx.slit1, ctx.slit2);

    ScreenSpec fwd;
    fwd.orientation = ScreenOrientation::Forward;
    fwd.nbins = ctx.cfg.screens.forward_bins;
    run.forward = record(run.trajectories, fwd);

    if (ctx.setup.has_sideways_screen()) {
        run.has_sideways = true;
        ScreenSpec side;
        side.orientation = ScreenOrientation::Sideways;
        side.nbins = ctx.cfg.screens.sideways_bins;
        run.sideways = record(run.trajectories, side);
        run.sweeper = sweeper_metrics(run.trajectories, apply_stochastic(ctx.slit2, a), geom);
    }
    return run;
}

void write_trajectories_csv(const RunContext& ctx, const std::string& path,
                            const TrajectoryRun& run) {
    const ExperimentSetup& s = ctx.setup;
    CsvWriter w(path);
    write_setup_meta(w, ctx);
    w.meta("a", run.a);
    w.meta("attenuation", "stochastic");
    w.meta("seed", static_cast<double>(ctx.seed));
    w.meta("sampler", ctx.cfg.trajectories.sampler == LaunchSampler::Quantile ? "quantile" : "random");
    w.meta("n_per_slit", static_cast<double>(ctx.cfg.trajectories.n_per_slit));
    w.meta("rel_tol", ctx.cfg.trajectories.rel_tol);
    w.meta("abs_tol_sigma", ctx.cfg.trajectories.abs_tol_sigma);
    w.meta("units", "t:s x:m y:m");
    w.header({"traj_id", "slit", "t", "x", "y"});
    for (std::size_t id = 0; id < run.trajectories.size(); ++id) {
        const Trajectory& traj = run.trajectories[id];
        for (const TrajectoryPoint& p : traj.points) {
            w.row({static_cast<double>(id), static_cast<double>(traj.source_slit),
                   s.to_si_time(p.t), s.to_si_length(p.x), s.to_si_length(p.y)});
        }
    }
    w.close();
}

void write_screen_csv(const RunContext& ctx, const std::string& path, const ScreenRecord& rec,
                      double a) {
    const ExperimentSetup& s = ctx.setup;
    CsvWriter w(path);
    write_setup_meta(w, ctx);
    w.meta("a", a);
    w.meta("orientation", rec.orientation == ScreenOrientation::Forward ? "forward" : "sideways");
    w.meta("launched_slit1", static_cast<double>(rec.launched_slit1));
    w.meta("launched_slit2", static_cast<double>(rec.launched_slit2));
    w.meta("missed_slit1", static_cast<double>(rec.missed_slit1));
    w.meta("missed_slit2", static_cast<double>(rec.missed_slit2));
    w.meta("units", "bin_center:m");
    w.header({"bin_center", "counts_total", "counts_slit1", "counts_slit2"});
    for (int i = 0; i < rec.nbins; ++i) {
        w.row({s.to_si_length(rec.bin_center(i)), static_cast<double>(rec.counts_total[i]),
               static_cast<double>(rec.counts_slit1[i]), static_cast<double>(rec.counts_slit2[i])});
    }
    w.close();
}

json termination_tally(const TrajectoryRun& run) {
    long fwd = 0, side = 0, stall = 0, maxt = 0;
    for (const Trajectory& t : run.trajectories) {
        switch (t.termination) {
            case Termination::ReachedForwardScreen: ++fwd; break;
            case Termination::ReachedSidewaysScreen: ++side; break;
            case Termination::NodeStall: ++stall; break;
            case Termination::MaxTime: ++maxt; break;
        }
    }
    return json{{"forward_screen", fwd}, {"sideways_screen", side},
                {"node_stall", stall}, {"max_time", maxt}};
}

void write_json_file(const std::string& path, const json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << doc.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_manifest(const RunnerOptions& opts, const RunContext& ctx, OutputSet& outputs,
                    const std::string& command, double wall_seconds) {
    json files = json::array();
    for (const std::string& name : outputs.files()) {
        const std::string full = (fs::path(outputs.dir()) / name).string();
        files.push_back({{"name", name},
                         {"bytes", fs::file_size(full)},
                         {"fnv1a64", to_hex(fnv1a64_file(full))}});
    }
    json doc{{"tool", "qsweep"},
             {"version", "1.0.0"},
             {"command", command},
             {"config_file", opts.config_path},
             {"config_fnv1a64", to_hex(fnv1a64_file(opts.config_path))},
             {"schema_version", ctx.cfg.schema_version},
             {"seed", ctx.seed},
             {"threads_requested", ctx.threads},
             {"wall_seconds", wall_seconds},
             {"files", files}};
    write_json_file((fs::path(outputs.dir()) / "manifest.json").string(), doc);
}

template <typename Fn>
RunOutcome guarded_run(const std::string& command, const RunnerOptions& opts, Fn&& body) {
    RunOutcome outcome;
    try {
        const auto start = std::chrono::steady_clock::now();
        RunContext ctx = make_context(opts);
        OutputSet outputs(opts.out_dir);
        try {
            outcome.exit_code = body(ctx, outputs);
        } catch (...) {
            outputs.discard_all();
            throw;
        }
        const double wall = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - start).count();
        write_manifest(opts, ctx, outputs, command, wall);
        outcome.files = outputs.files();
        outcome.files.push_back("manifest.json");
    } catch (const ConfigError& e) {
        outcome.exit_code = 1;
        outcome.message = e.what();
    } catch (const std::invalid_argument& e) {
        outcome.exit_code = 1;
        outcome.message = e.what();
    } catch (const std::exception& e) {
        outcome.exit_code = 2;
        outcome.message = e.what();
    }
    return outcome;
}

std::vector<AttenuationKind> requested_kinds(const RunContext& ctx) {
    if (ctx.cfg.both_attenuation_modes) {
        return {AttenuationKind::Stochastic, AttenuationKind::Deterministic};
    }
    return {ctx.cfg.attenuation_kind};
}

} // namespace

RunOutcome run_profile(const RunnerOptions& opts) {
    return guarded_run("profile", opts, [](RunContext& ctx, OutputSet& outputs) {
        json metrics = json::array();
        for (double a : ctx.a_values) {
            for (AttenuationKind kind : requested_kinds(ctx)) {
                const ProfileRun run = evaluate_profile(ctx, a, kind);
                const std::string name = std::string("profile_") + kind_name(kind) +
                                         "_a" + format_a(a) + ".csv";
                write_profile_csv(ctx, outputs.path(name), run);
                metrics.push_back({{"a", a},
                                   {"mode", kind_name(kind)},
                                   {"V_measured", run.measured.ok ? run.measured.value : -1.0},
                                   {"V_theory", run.theory.value},
                                   {"mass_fraction", run.profile.mass_fraction}});
            }
            const double t_prof = ctx.cfg.profile.time_tau.value_or(ctx.setup.screen_time_internal());
            const double sig_t = dispersed_sigma(ctx.slit1, t_prof);
            const double half = ctx.cfg.profile.halfwidth_sigma_t * sig_t
                              + 0.5 * ctx.setup.separation_internal();
            write_fields_scan(ctx, outputs.path("fields_scan_a" + format_a(a) + ".csv"), a,
                              {t_prof}, linspace(-half, half, ctx.cfg.profile.grid_points));
        }
        write_json_file(outputs.path("metrics.json"),
                        json{{"command", "profile"}, {"rows", metrics}});
        return 0;
    });
}

RunOutcome run_trajectories(const RunnerOptions& opts) {
    return guarded_run("trajectories", opts, [](RunContext& ctx, OutputSet& outputs) {
        if (ctx.cfg.both_attenuation_modes ||
            ctx.cfg.attenuation_kind == AttenuationKind::Deterministic) {
            throw ConfigError("trajectories require attenuation.mode none or stochastic "
                              "(the deterministic law is a density mixture)");
        }
        json metrics = json::array();
        for (double a : ctx.a_values) {
            const TrajectoryRun run = run_trajectory_batch(ctx, a);
            write_trajectories_csv(ctx, outputs.path("trajectories_a" + format_a(a) + ".csv"), run);
            write_screen_csv(ctx, outputs.path("screen_forward_a" + format_a(a) + ".csv"),
                             run.forward, a);
            if (run.has_sideways) {
                write_screen_csv(ctx, outputs.path("screen_sideways_a" + format_a(a) + ".csv"),
                                 run.sideways, a);
            }

            // density heat map over (x, t)
            const double t_end = ctx.setup.screen_time_internal();
            const double sig_t = dispersed_sigma(ctx.slit1, t_end);
            const double half = ctx.cfg.profile.halfwidth_sigma_t * sig_t
                              + 0.5 * ctx.setup.separation_internal();
            write_fields_scan(ctx, outputs.path("fields_scan_a" + format_a(a) + ".csv"), a,
                              linspace(0.0, t_end, 101), linspace(-half, half, 401));

            json entry{{"a", a},
                       {"crossings", run.crossings},
                       {"terminations", termination_tally(run)}};
            if (run.has_sideways && run.sweeper.ok) {
                entry["n_a"] = run.sweeper.n_sideways;
                entry["sideways_fraction"] = run.sweeper.sideways_fraction;
                entry["median_angle_rad"] = run.sweeper.median_angle_rad;
                entry["bunching_iqr"] = run.sweeper.iqr_arrival_y * ctx.setup.length_unit;
                entry["bunching_ratio"] = run.sweeper.bunching_ratio;
            }
            metrics.push_back(entry);
        }
        write_json_file(outputs.path("metrics.json"),
                        json{{"command", "trajectories"}, {"rows", metrics}});
        return 0;
    });
}

RunOutcome run_sweep_a(const RunnerOptions& opts) {
    return guarded_run("sweep-a", opts, [](RunContext& ctx, OutputSet& outputs) {
        if (ctx.a_values.size() < 2) {
            throw ConfigError("sweep-a requires at least two distinct a values");
        }
        if (ctx.cfg.both_attenuation_modes ||
            ctx.cfg.attenuation_kind == AttenuationKind::Deterministic) {
            throw ConfigError("sweep-a integrates trajectories; use attenuation.mode "
                              "none or stochastic");
        }
        CsvWriter table(outputs.path("sweep_summary.csv"));
        write_setup_meta(table, ctx);
        table.meta("seed", static_cast<double>(ctx.seed));
        table.header({"a", "V_stoch_theory", "V_det_theory", "V_stoch_measured", "D",
                      "duality_residual", "n_a_sideways", "sideways_fraction",
                      "median_angle_rad", "bunching_iqr_y_m", "bunching_ratio", "crossings"});
        json metrics = json::array();
        for (double a : ctx.a_values) {
            const ProfileRun prof = evaluate_profile(ctx, a, AttenuationKind::Stochastic);
            const DualityMetrics dual = duality_metrics(a);
            const TrajectoryRun run = run_trajectory_batch(ctx, a);
            const double v_det = theoretical_visibility(a, AttenuationKind::Deterministic).value;
            table.row({a, prof.theory.value, v_det,
                       prof.measured.ok ? prof.measured.value : -1.0,
                       dual.distinguishability, dual.residual,
                       static_cast<double>(run.sweeper.n_sideways),
                       run.sweeper.sideways_fraction, run.sweeper.median_angle_rad,
                       run.sweeper.iqr_arrival_y * ctx.setup.length_unit,
                       run.sweeper.bunching_ratio, static_cast<double>(run.crossings)});
            metrics.push_back({{"a", a},
                               {"mode", "stochastic"},
                               {"V_measured", prof.measured.ok ? prof.measured.value : -1.0},
                               {"V_theory", prof.theory.value},
                               {"D", dual.distinguishability},
                               {"duality_residual", dual.residual},
                               {"n_a", run.sweeper.n_sideways},
                               {"median_angle_rad", run.sweeper.median_angle_rad},
                               {"bunching_iqr", run.sweeper.iqr_arrival_y * ctx.setup.length_unit},
                               {"bunching_ratio", run.sweeper.bunching_ratio},
                               {"sideways_fraction", run.sweeper.sideways_fraction},
                               {"crossings", run.crossings},
                               {"terminations", termination_tally(run)}});
        }
        table.close();
        write_json_file(outputs.path("metrics.json"),
                        json{{"command", "sweep-a"}, {"rows", metrics}});
        return 0;
    });
}

RunOutcome run_duality_table(const RunnerOptions& opts) {
    return guarded_run("duality-table", opts, [](RunContext& ctx, OutputSet& outputs) {
        CsvWriter table(outputs.path("duality_table.csv"));
        write_setup_meta(table, ctx);
        table.header({"a", "V_stoch_theory", "V_det_theory", "V_stoch_measured",
                      "V_det_measured"});
        json metrics = json::array();
        for (double a : ctx.a_values) {
            const ProfileRun st = evaluate_profile(ctx, a, AttenuationKind::Stochastic);
            const ProfileRun de = evaluate_profile(ctx, a, AttenuationKind::Deterministic);
            const DualityMetrics dual = duality_metrics(a);
            table.row({a, st.theory.value, de.theory.value,
                       st.measured.ok ? st.measured.value : -1.0,
                       de.measured.ok ? de.measured.value : -1.0});
            metrics.push_back({{"a", a},
                               {"V_stoch_theory", st.theory.value},
                               {"V_det_theory", de.theory.value},
                               {"V_stoch_measured", st.measured.ok ? st.measured.value : -1.0},
                               {"V_det_measured", de.measured.ok ? de.measured.value : -1.0},
                               {"D", dual.distinguishability},
                               {"duality_residual", dual.residual}});
        }
        table.close();
        write_json_file(outputs.path("metrics.json"),
                        json{{"command", "duality-table"}, {"rows", metrics}});
        return 0;
    });
}

namespace {

struct VerifyCheck {
    std::string name;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

// Shared grid for the verification scans: 10^4 points across +-10 sigma_t
// around the midline at each probe time.
std::vector<double> verify_grid(const PacketParams& p, double t, double center) {
    const double half = 10.0 * dispersed_sigma(p, t);
    return linspace(center - half, center + half, 10000);
}

} // namespace

RunOutcome run_verify(const RunnerOptions& opts) {
    return guarded_run("verify", opts, [](RunContext& ctx, OutputSet& outputs) {
        std::vector<VerifyCheck> checks;
        const double t_screen = ctx.setup.screen_time_internal();
        const std::vector<double> times{0.1, 1.0, t_screen};
        const double mid = 0.5 * (ctx.slit1.center + ctx.slit2.center);

        // oracle equivalence, coherent, stochastic weighting
        {
            VerifyCheck dens{"oracle_density_equivalence", 0.0, 1e-10, false};
            VerifyCheck vel{"oracle_velocity_equivalence", 0.0, 1e-8, false};
            for (double a : {1.0, 0.25, 1e-4, 1e-8}) {
                const PacketParams p2 = apply_stochastic(ctx.slit2, a);
                const TwoChannelField field{ctx.slit1, p2, CoherenceMode::Coherent, 1e-300};
                for (double t : times) {
                    const std::vector<double> xs = verify_grid(ctx.slit1, t, mid);
                    double max_p = 0.0, max_dp = 0.0, max_v = 0.0, max_dv = 0.0;
                    const std::vector<FieldSample> fs = scan_fields(field, xs, t, ctx.threads);
                    for (std::size_t i = 0; i < xs.size(); ++i) {
                        const double born = oracle::born_density(
                            oracle::psi(ctx.slit1, xs[i], t), oracle::psi(p2, xs[i], t));
                        const oracle::OracleVelocity vb =
                            oracle::bohm_velocity(ctx.slit1, p2, xs[i], t);
                        max_p = std::max(max_p, fs[i].Ptot);
                        max_dp = std::max(max_dp, std::fabs(fs[i].Ptot - born));
                        if (!vb.node && !fs[i].node) {
                            max_v = std::max(max_v, std::fabs(vb.v));
                            max_dv = std::max(max_dv, std::fabs(fs[i].vtot - vb.v));
                        }
                    }
                    dens.max_deviation = std::max(dens.max_deviation, max_dp / max_p);
                    vel.max_deviation = std::max(vel.max_deviation, max_dv / max_v);
                }
            }
            dens.pass = dens.max_deviation <= dens.tolerance;
            vel.pass = vel.max_deviation <= vel.tolerance;
            checks.push_back(dens);
            checks.push_back(vel);
        }

        // continuity (coherent), finite differences with the pinned steps
        {
            VerifyCheck cont{"continuity_coherent", 0.0, 1e-4, false};
            const double dt = 1e-5, dx = 1e-5;
            for (double a : {1.0, 1e-8}) {
                const PacketParams p2 = apply_stochastic(ctx.slit2, a);
                const TwoChannelField field{ctx.slit1, p2, CoherenceMode::Coherent, 1e-300};
                for (double t : times) {
                    const std::vector<double> xs = verify_grid(ctx.slit1, t, mid);
                    double max_res = 0.0, max_dj = 0.0;
                    for (double x : xs) {
                        const double p_plus = field.sample(x, t + dt).Ptot;
                        const double p_minus = field.sample(x, t - dt >= 0.0 ? t - dt : 0.0).Ptot;
                        const double denom_t = (t - dt >= 0.0) ? 2.0 * dt : dt;
                        const double j_plus = field.sample(x + dx, t).Jtot;
                        const double j_minus = field.sample(x - dx, t).Jtot;
                        const double dj = (j_plus - j_minus) / (2.0 * dx);
                        const double dp = (p_plus - p_minus) / denom_t;
                        max_res = std::max(max_res, std::fabs(dp + dj));
                        max_dj = std::max(max_dj, std::fabs(dj));
                    }
                    cont.max_deviation = std::max(cont.max_deviation, max_res / max_dj);
                }
            }
            cont.pass = cont.max_deviation <= cont.tolerance;
            checks.push_back(cont);
        }

        // projection-sum consistency and incoherent reduction
        {
            VerifyCheck proj{"projection_sum", 0.0, 1e-14, false};
            VerifyCheck inc{"incoherent_reduction", 0.0, 1e-14, false};
            const PacketParams p2 = apply_stochastic(ctx.slit2, 0.25);
            for (double t : times) {
                const std::vector<double> xs = verify_grid(ctx.slit1, t, mid);
                for (double x : xs) {
                    const PacketSample s1 = packet_eval(ctx.slit1, x, t);
                    const PacketSample s2 = packet_eval(p2, x, t);
                    const FieldSample f = evaluate_fields(s1, s2, CoherenceMode::Coherent);
                    const double sum = f.proj.v1 + f.proj.v2;
                    if (f.Ptot > 0.0) {
                        proj.max_deviation = std::max(proj.max_deviation,
                                                      std::fabs(sum - f.Ptot) / f.Ptot);
                    }
                    const FieldSample fi = evaluate_fields(s1, s2, CoherenceMode::Incoherent);
                    const double direct = s1.amplitude * s1.amplitude
                                        + s2.amplitude * s2.amplitude;
                    if (direct > 0.0) {
                        inc.max_deviation = std::max(inc.max_deviation,
                                                     std::fabs(fi.Ptot - direct) / direct);
                    }
                }
            }
            proj.pass = proj.max_deviation <= proj.tolerance;
            inc.pass = inc.max_deviation <= inc.tolerance;
            checks.push_back(proj);
            checks.push_back(inc);
        }

        // current antisymmetry for the symmetric coherent setup
        {
            VerifyCheck anti{"current_antisymmetry", 0.0, 1e-12, false};
            const TwoChannelField field{ctx.slit1, ctx.slit2, CoherenceMode::Coherent, 1e-300};
            for (double t : times) {
                const double half = 10.0 * dispersed_sigma(ctx.slit1, t);
                double max_j = 0.0, max_d = 0.0;
                for (double x : linspace(0.0, half, 2000)) {
                    const double jp = field.sample(mid + x, t).Jtot;
                    const double jm = field.sample(mid - x, t).Jtot;
                    max_j = std::max(max_j, std::fabs(jp));
                    max_d = std::max(max_d, std::fabs(jp + jm));
                }
                anti.max_deviation = std::max(anti.max_deviation, max_d / max_j);
            }
            anti.pass = anti.max_deviation <= anti.tolerance;
            checks.push_back(anti);
        }

        // norm conservation of the oracle superposition
        {
            VerifyCheck norm{"oracle_norm_conservation", 0.0, 1e-8, false};
            for (double a : {1.0, 1e-8}) {
                const PacketParams p2 = apply_stochastic(ctx.slit2, a);
                double first = -1.0;
                for (double t : {0.0, 1.0, 5.0, t_screen}) {
                    const double half = 12.0 * dispersed_sigma(ctx.slit1, t)
                                      + 0.5 * ctx.setup.separation_internal();
                    const std::vector<double> xs = linspace(mid - half, mid + half, 32769);
                    double area = 0.0;
                    for (std::size_t i = 1; i < xs.size(); ++i) {
                        const double y1 = oracle::born_density(oracle::psi(ctx.slit1, xs[i], t),
                                                               oracle::psi(p2, xs[i], t));
                        const double y0 = oracle::born_density(oracle::psi(ctx.slit1, xs[i - 1], t),
                                                               oracle::psi(p2, xs[i - 1], t));
                        area += 0.5 * (y0 + y1) * (xs[i] - xs[i - 1]);
                    }
                    if (first < 0.0) first = area;
                    norm.max_deviation = std::max(norm.max_deviation,
                                                  std::fabs(area - first) / first);
                }
            }
            norm.pass = norm.max_deviation <= norm.tolerance;
            checks.push_back(norm);
        }

        bool all_pass = true;
        json rows = json::array();
        for (const VerifyCheck& c : checks) {
            all_pass = all_pass && c.pass;
            rows.push_back({{"check", c.name},
                            {"max_deviation", c.max_deviation},
                            {"tolerance", c.tolerance},
                            {"pass", c.pass}});
            std::cout << (c.pass ? "PASS " : "FAIL ") << c.name
                      << "  max_deviation=" << c.max_deviation
                      << "  tolerance=" << c.tolerance << "\n";
        }
        write_json_file(outputs.path("verify_report.json"),
                        json{{"command", "verify"}, {"all_pass", all_pass}, {"checks", rows}});
        return all_pass ? 0 : 2;
    });
}

RunOutcome run_command(const std::string& command, const RunnerOptions& opts) {
    if (command == "profile") return run_profile(opts);
    if (command == "trajectories") return run_trajectories(opts);
    if (command == "sweep-a") return run_sweep_a(opts);
    if (command == "duality-table") return run_duality_table(opts);
    if (command == "verify") return run_verify(opts);
    RunOutcome bad;
    bad.exit_code = 1;
    bad.message = "unknown command: " + command;
    return bad;
}

} // namespace qsweep
