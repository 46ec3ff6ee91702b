#include "fluxinit/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "fluxinit/circuit_spectrum.hpp"
#include "fluxinit/config.hpp"
#include "fluxinit/crossing_fit.hpp"
#include "fluxinit/csv.hpp"
#include "fluxinit/decay_fit.hpp"
#include "fluxinit/dynamics.hpp"
#include "fluxinit/errors.hpp"
#include "fluxinit/full_model.hpp"
#include "fluxinit/phase_spectroscopy.hpp"
#include "fluxinit/readout.hpp"
#include "fluxinit/spectrum_fit.hpp"
#include "fluxinit/synthetic.hpp"
#include "fluxinit/units.hpp"

namespace fluxinit {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Context {
    const CliOptions& opts;
    const RunConfig& cfg;
    fs::path out_dir;
    Provenance prov;
    std::ostream& out;

    void note(const std::string& msg) const {
        if (!opts.quiet) out << msg << '\n';
    }

    void csv(const std::string& name, const Table& table) const {
        write_csv(out_dir / name, prov, table);
        note(fmt::format("wrote {}", (out_dir / name).string()));
    }

    void json(const std::string& name, ojson body) const {
        ojson doc;
        doc["provenance"] = {{"tool", "fluxinit"},
                             {"version", std::string(kVersion)},
                             {"config", fmt::format("{:016x}", prov.config_hash)},
                             {"command", prov.command}};
        for (auto& [k, v] : body.items()) doc[k] = v;
        const fs::path path = out_dir / name;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error(ErrorKind::Io, fmt::format("cannot open '{}' for writing", path.string()));
        f << doc.dump(2) << '\n';
        if (!f) throw Error(ErrorKind::Io, fmt::format("write to '{}' failed", path.string()));
        note(fmt::format("wrote {}", path.string()));
    }
};

// splitmix64, so each generator gets an independent stream from one seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

struct OperatingPoint {
    double flux_offset = 0.0;
    EigenSolution sol;
    ReducedParams params;
};

OperatingPoint operating_point(const RunConfig& cfg) {
    const auto& d = cfg.device;
    OperatingPoint op;
    op.flux_offset = d.flux_offset ? *d.flux_offset
                                   : find_resonance_flux(d.circuit, d.omega_r, d.triple, d.basis_dim);
    op.sol = solve_spectrum(d.circuit.with_flux(std::numbers::pi + op.flux_offset), d.basis_dim);
    op.params = reduced_params_from_spectrum(op.sol, d.triple, d.omega_r, d.g_coupled, d.Gamma);
    return op;
}

ControlSchedule schedule_for(const RunConfig& cfg, const OperatingPoint& op, double T_pre) {
    const RampSpec ramp = cfg.ramp();
    const double omega0 = omega0_for_plateau(ramp, cfg.schedule.omega_plateau);
    return make_schedule(ramp, T_pre, op.flux_offset, op.params.omega_p, omega0);
}

// Sample indices on the output grid: every stride-th sample plus the last.
std::vector<std::size_t> output_indices(const std::vector<double>& times, double output_dt) {
    std::vector<std::size_t> idx;
    const double start = times.front();
    double next = start;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] >= next - 1e-9) {
            idx.push_back(k);
            next = start + std::round((times[k] - start) / output_dt + 1.0) * output_dt;
        }
    }
    if (idx.back() != times.size() - 1) idx.push_back(times.size() - 1);
    return idx;
}

std::string pop_column(const std::string& label) { return "P_" + label; }

// ---------------------------------------------------------------------------

void cmd_spectrum(const Context& ctx) {
    const auto& d = ctx.cfg.device;
    const int levels = std::min(ctx.cfg.sweep.levels, d.basis_dim);
    const auto sol = solve_spectrum(d.circuit, d.basis_dim);
    ojson energies = ojson::array();
    for (int k = 0; k < levels; ++k) energies.push_back(sol.energies(k) - sol.energies(0));
    ctx.json("spectrum.json",
             {{"phi_ext", d.circuit.phi_ext},
              {"basis_dim", d.basis_dim},
              {"energies_GHz", energies},
              {"omega_ge", sol.omega_ge()},
              {"omega_ef", sol.omega_ef()},
              {"omega_gf", sol.omega_gf()},
              {"omega_gh", sol.omega_gh()},
              {"n_ge", charge_matrix_element(sol, 0, 1)},
              {"n_gf", charge_matrix_element(sol, 0, 2)},
              {"n_ef", charge_matrix_element(sol, 1, 2)},
              {"n_eh", charge_matrix_element(sol, 1, 3)}});
    if (!ctx.cfg.sweep.flux_offsets.empty()) {
        Table t;
        t.columns.push_back("flux_offset_rad");
        for (int k = 1; k < levels; ++k) t.columns.push_back(fmt::format("E{}_minus_E0_GHz", k));
        for (double off : ctx.cfg.sweep.flux_offsets) {
            const auto s = solve_spectrum(d.circuit.with_flux(std::numbers::pi + off), d.basis_dim);
            std::vector<double> row{off};
            for (int k = 1; k < levels; ++k) row.push_back(s.energies(k) - s.energies(0));
            t.rows.push_back(std::move(row));
        }
        ctx.csv("spectrum_sweep.csv", t);
    }
}

void cmd_matrix_elements(const Context& ctx) {
    const auto& d = ctx.cfg.device;
    const auto curve =
        matrix_element_flux_sweep(d.circuit, d.omega_r, ctx.cfg.sweep.flux_offsets, d.basis_dim);
    Table t{{"flux_offset_rad", "n_gf", "sideband_freq_GHz"}, {}};
    for (std::size_t k = 0; k < curve.values.size(); ++k) {
        t.rows.push_back({curve.flux_offsets[k], curve.values[k], curve.sideband_freqs[k]});
    }
    ctx.csv("matrix_elements.csv", t);
}

void cmd_find_resonance(const Context& ctx) {
    const auto& d = ctx.cfg.device;
    const auto op = operating_point(ctx.cfg);
    const auto triple = subspace_triple(d.triple);
    const double n_couple =
        charge_matrix_element(op.sol, triple.coupling_levels.first, triple.coupling_levels.second);
    const double n_drive =
        charge_matrix_element(op.sol, triple.drive_levels.first, triple.drive_levels.second);
    ctx.json("resonance.json",
             {{"triple", to_string(d.triple)},
              {"flux_offset_rad", op.flux_offset},
              {"flux_offset_over_2pi", op.flux_offset / kTwoPi},
              {"omega_ge", op.sol.omega_ge()},
              {"omega_gf", op.sol.omega_gf()},
              {"omega_gh", op.sol.omega_gh()},
              {"omega_s", op.params.omega_s},
              {"Delta_GHz", op.params.Delta},
              {"coupling_element", n_couple},
              {"drive_element", n_drive},
              {"g_r_GHz", n_couple > 0.0 ? d.g_coupled / n_couple : 0.0}});
}

void cmd_simulate_init(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const auto op = operating_point(cfg);
    const auto schedule = schedule_for(cfg, op, cfg.schedule.T_pre);
    const auto tr = evolve_reduced(op.params, schedule, Vector3c(1.0, 0.0, 0.0), cfg.device.triple);
    const auto idx = output_indices(tr.times, cfg.schedule.output_dt);

    // Cumulative exp(-Gamma int_0^t sin^2 theta) with theta = atan(Omega_ef / g).
    const double g = cfg.device.g_coupled;
    std::vector<double> theta(tr.times.size()), survival(tr.times.size(), 1.0);
    double integral = 0.0;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        theta[k] = std::atan2(schedule.omega_ef(tr.times[k]), g);
        if (k > 0 && tr.times[k] > 0.0) {
            const double s0 = std::sin(theta[k - 1]), s1 = std::sin(theta[k]);
            integral += 0.5 * (tr.times[k] - tr.times[k - 1]) * (s0 * s0 + s1 * s1);
        }
        survival[k] = std::exp(-cfg.device.Gamma * integral);
    }

    Table t{{"time_ns", "Omega_ef_GHz", "theta_rad"}, {}};
    for (const auto& l : tr.labels) t.columns.push_back(pop_column(l));
    t.columns.push_back("P_ground");
    t.columns.push_back("survival_analytic");
    for (std::size_t k : idx) {
        std::vector<double> row{tr.times[k], schedule.omega_ef(tr.times[k]), theta[k]};
        for (const auto& p : tr.populations) row.push_back(p[k]);
        row.push_back(tr.p_ground[k]);
        row.push_back(survival[k]);
        t.rows.push_back(std::move(row));
    }
    ctx.csv("trajectory.csv", t);

    // Drive-segment leakage estimate.
    std::vector<double> ts, th, om;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        if (tr.times[k] < 0.0) continue;
        ts.push_back(tr.times[k]);
        th.push_back(theta[k]);
        om.push_back(std::hypot(schedule.omega_ef(tr.times[k]), g));
    }
    const auto leak = nonadiabatic_leakage(ts, th, om);

    ojson summary = {{"triple", to_string(cfg.device.triple)},
                     {"flux_offset_rad", op.flux_offset},
                     {"Delta_GHz", op.params.Delta},
                     {"Omega_plateau_GHz", cfg.schedule.omega_plateau},
                     {"Omega_0_GHz", schedule.Omega_0},
                     {"T_ns", cfg.schedule.T},
                     {"T_pre_ns", cfg.schedule.T_pre}};
    ojson finals;
    for (std::size_t i = 0; i < tr.labels.size(); ++i) finals[pop_column(tr.labels[i])] = tr.populations[i].back();
    finals["P_ground"] = tr.final_ground();
    finals["excited"] = tr.final_excited();
    finals["survival_analytic"] = survival.back();
    summary["final"] = finals;
    summary["nonadiabatic_leakage"] = {{"plus", leak.plus}, {"minus", leak.minus}};

    if (cfg.numerics.lab_frame) {
        const auto lab = evolve_reduced_lab(op.params, schedule, Vector3c(1.0, 0.0, 0.0),
                                            cfg.numerics.lab_dt, cfg.device.triple);
        Table lt{{"time_ns"}, {}};
        for (const auto& l : lab.labels) lt.columns.push_back(pop_column(l));
        lt.columns.push_back("P_ground");
        for (std::size_t k : idx) {
            std::vector<double> row{lab.times[k]};
            for (const auto& p : lab.populations) row.push_back(p[k]);
            row.push_back(lab.p_ground[k]);
            lt.rows.push_back(std::move(row));
        }
        ctx.csv("lab_trajectory.csv", lt);
        summary["lab_frame_final_excited"] = lab.final_excited();
    }
    if (cfg.numerics.full_model) {
        FullModelSpec spec;
        spec.omega_r = cfg.device.omega_r;
        spec.Gamma = cfg.device.Gamma;
        spec.photon_dim = cfg.numerics.photon_dim;
        spec.fluxonium_levels = cfg.numerics.fluxonium_levels;
        spec.g_coupled = cfg.device.g_coupled;
        spec.kind = cfg.device.triple;
        spec.dt = cfg.numerics.full_dt;
        spec.basis_dim = cfg.device.basis_dim;
        const auto triple = subspace_triple(cfg.device.triple);
        const auto full = evolve_full_lindblad(cfg.device.circuit.with_flux(std::numbers::pi), spec,
                                               schedule, {triple.qubit_level[0], triple.photons[0]});
        Table ft{{"time_ns"}, {}};
        for (const auto& l : full.labels) ft.columns.push_back(pop_column(l));
        for (std::size_t k : idx) {
            std::vector<double> row{full.times[k]};
            for (const auto& p : full.populations) row.push_back(p[k]);
            ft.rows.push_back(std::move(row));
        }
        ctx.csv("full_trajectory.csv", ft);
        summary["full_model_final_excited"] = full.final_excited();
        summary["full_model_warnings"] = full.warnings;
    }
    ctx.json("simulate_init.json", summary);
}

ErrorMap run_map(const Context& ctx, const OperatingPoint& op, const std::vector<double>& omegas) {
    MapSettings settings;
    settings.ramp = ctx.cfg.ramp();
    settings.T_pre = ctx.cfg.has_schedule ? ctx.cfg.schedule.T_pre : 10.0;
    settings.jobs = ctx.opts.jobs;
    return initialization_error_map(op.params, omegas, ctx.cfg.sweep.durations, settings);
}

void cmd_error_map(const Context& ctx) {
    const auto op = operating_point(ctx.cfg);
    const auto map = run_map(ctx, op, ctx.cfg.sweep.omegas);
    Table t{{"omega_GHz", "T_ns", "error", "leakage_P_b"}, {}};
    for (std::size_t i = 0; i < map.omegas.size(); ++i) {
        for (std::size_t j = 0; j < map.durations.size(); ++j) {
            t.rows.push_back({map.omegas[i], map.durations[j], map.errors[i][j], map.leakage[i][j]});
        }
    }
    ctx.csv("error_map.csv", t);

    Table dt{{"omega_GHz", "tau_ns", "max_relative_residual", "poor_fit"}, {}};
    for (std::size_t i = 0; i < map.omegas.size(); ++i) {
        try {
            const auto fit = extract_decay_time(map.durations, map.errors[i],
                                                ctx.cfg.numerics.decay_min_duration);
            dt.rows.push_back({map.omegas[i], fit.tau, fit.max_relative_residual, fit.poor_fit ? 1.0 : 0.0});
        } catch (const Error&) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            dt.rows.push_back({map.omegas[i], nan, nan, 1.0});
        }
    }
    ctx.csv("decay_times.csv", dt);
}

void cmd_leakage_removal(const Context& ctx) {
    const auto op = operating_point(ctx.cfg);
    const auto curve = leakage_removal_efficiency(op.params, ctx.cfg.ramp(), ctx.cfg.schedule.omega_plateau,
                                                  ctx.cfg.sweep.t_pre, ctx.opts.jobs);
    const auto labels = subspace_triple(ctx.cfg.device.triple).labels;
    Table t{{"T_pre_ns", "efficiency", "excited", pop_column(labels[0]), pop_column(labels[1]),
             pop_column(labels[2])},
            {}};
    double best = 0.0, best_t = 0.0;
    for (std::size_t k = 0; k < curve.t_pre.size(); ++k) {
        t.rows.push_back({curve.t_pre[k], curve.efficiency[k], curve.excited[k], curve.p_a[k],
                          curve.p_b[k], curve.p_c[k]});
        if (curve.efficiency[k] > best) {
            best = curve.efficiency[k];
            best_t = curve.t_pre[k];
        }
    }
    ctx.csv("leakage_removal.csv", t);
    const double g = ctx.cfg.device.g_coupled;
    ctx.json("leakage_removal.json",
             {{"T_ns", ctx.cfg.schedule.T},
              {"Omega_plateau_GHz", ctx.cfg.schedule.omega_plateau},
              {"oscillation_period_ns", oscillation_period(curve.t_pre, curve.efficiency)},
              {"vacuum_rabi_period_ns", g > 0.0 ? 1.0 / g : 0.0},
              {"max_efficiency", best},
              {"max_efficiency_T_pre_ns", best_t}});
}

void cmd_steady_state(const Context& ctx) {
    const auto op = operating_point(ctx.cfg);
    const auto& ss = ctx.cfg.steady_state;
    const auto map = run_map(ctx, op, ss.omegas);
    Table t{{"omega_GHz", "tau_ns", "gamma_init_per_ns", "e_steady", "poor_fit"}, {}};
    for (std::size_t i = 0; i < map.omegas.size(); ++i) {
        const auto fit =
            extract_decay_time(map.durations, map.errors[i], ctx.cfg.numerics.decay_min_duration);
        const double rate = 1.0 / fit.tau;
        t.rows.push_back({map.omegas[i], fit.tau, rate, steady_state_error(ss.n_th, ss.T1_us, rate),
                          fit.poor_fit ? 1.0 : 0.0});
    }
    ctx.csv("steady_state.csv", t);
}

void cmd_fit_crossing(const Context& ctx) {
    const auto data = read_crossing_csv(ctx.cfg.calibration.crossing);
    const auto fit = fit_avoided_crossing(data, ctx.cfg.calibration.max_residual_rms);
    ctx.json("crossing_fit.json",
             {{"g_rf_GHz", fit.g_rf},
              {"g_rf_uncertainty_GHz", fit.g_uncertainty},
              {"resonance_flux_rad", fit.resonance_flux},
              {"resonance_freq_GHz", fit.resonance_freq},
              {"omega_ef_line", {{"intercept_GHz", fit.ef_intercept}, {"slope_GHz_per_rad", fit.ef_slope}}},
              {"omega_s_line", {{"intercept_GHz", fit.s_intercept}, {"slope_GHz_per_rad", fit.s_slope}}},
              {"residual_rms_GHz", fit.residual_rms},
              {"columns_used", fit.columns_used}});
}

void cmd_fit_decay(const Context& ctx) {
    const auto series = read_decay_csv(ctx.cfg.calibration.decay);
    const auto fit = fit_photon_decay(series.delays, series.shifts);
    ojson body = {{"infinite_tau", fit.infinite_tau},
                  {"amplitude_GHz", fit.amplitude},
                  {"offset_GHz", fit.offset},
                  {"residual_rms_GHz", fit.residual_rms}};
    if (fit.infinite_tau) {
        body["tau_ns"] = nullptr;
    } else {
        body["tau_ns"] = fit.tau;
        body["tau_uncertainty_ns"] = fit.tau_uncertainty;
        body["Gamma_per_ns"] = 1.0 / fit.tau;
    }
    ctx.json("decay_fit.json", body);
}

void cmd_extract_spectrum(const Context& ctx) {
    const auto& cal = ctx.cfg.calibration;
    std::vector<double> voltages;
    const auto track = read_phase_track_csv(cal.phase_track, &voltages);
    const auto freq = track_frequency(track, cal.f_ge_at_zero);
    Table t{{"amplitude_index", "voltage", "phi_ext_rad", "f_ge_GHz", "step_GHz", "residual_rms_rad",
             "ambiguous"},
            {}};
    std::vector<double> phi(freq.f_ge.size());
    for (std::size_t i = 0; i < freq.f_ge.size(); ++i) {
        phi[i] = cal.flux_at_zero + cal.flux_per_volt * voltages[i];
        t.rows.push_back({static_cast<double>(i), voltages[i], phi[i], freq.f_ge[i], freq.steps[i],
                          freq.estimates[i].residual_rms, freq.estimates[i].ambiguous ? 1.0 : 0.0});
    }
    ctx.csv("frequency_track.csv", t);
    const auto fit = fit_flux_spectrum(phi, freq.f_ge, *cal.initial);
    ctx.json("spectrum_fit.json",
             {{"E_C", fit.params.E_C},
              {"E_L", fit.params.E_L},
              {"E_J", fit.params.E_J},
              {"uncertainty", {{"E_C", fit.uncertainties(0)}, {"E_L", fit.uncertainties(1)}, {"E_J", fit.uncertainties(2)}}},
              {"residual_rms_GHz", fit.residual_rms},
              {"evaluations", fit.evaluations},
              {"ambiguous", freq.ambiguous},
              {"aliasing_suspected", freq.aliasing_suspected}});
}

ojson point_json(IQPoint p) { return ojson::array({p.real(), p.imag()}); }

void cmd_metrology(const Context& ctx) {
    const auto& m = ctx.cfg.metrology;
    IQShotSet set;
    for (const auto& p : m.calibration_shots) {
        set.labels.push_back(p.filename().string());
        set.shots.push_back(read_iq_csv(p));
    }
    const auto fit = fit_iq_double_gaussian(set);
    MetrologyInput in;
    in.rabi_contrast = m.rabi_contrast;
    in.r_g = fit.r_g;
    in.r_e = fit.r_e;
    in.r_f = m.r_f;
    auto mean_of = [](const std::vector<IQPoint>& v) {
        IQPoint s = 0.0;
        for (const auto& p : v) s += p;
        return v.empty() ? s : s / static_cast<double>(v.size());
    };
    if (!m.after_init_g.empty()) {
        in.mean_g = mean_of(read_iq_csv(m.after_init_g));
        in.mean_e = mean_of(read_iq_csv(m.after_init_e));
    }
    const auto res = initialization_error_metrology(in);
    ojson weights = ojson::array();
    for (std::size_t i = 0; i < fit.set_weights.size(); ++i) {
        weights.push_back({{"set", set.labels[i]},
                           {"ground", fit.set_weights[i].first},
                           {"excited", fit.set_weights[i].second}});
    }
    ojson body = {{"r_g", point_json(fit.r_g)},
                  {"r_e", point_json(fit.r_e)},
                  {"sigma", fit.sigma},
                  {"set_weights", weights},
                  {"low_fidelity", fit.low_fidelity},
                  {"degenerate", fit.degenerate},
                  {"e_i", res.e_i},
                  {"e_i_contrast", res.e_i_contrast},
                  {"e_down", res.e_down},
                  {"P_e", res.p_e},
                  {"P_f", res.p_f}};
    if (in.mean_g && in.mean_e) {
        body["mean_g"] = point_json(*in.mean_g);
        body["mean_e"] = point_json(*in.mean_e);
        const double e_down = m.e_down.value_or(res.e_down);
        body["leakage_removal_bound"] = leakage_removal_bound(*in.mean_g, *in.mean_e, fit.r_g, fit.r_e, e_down);
    }
    ctx.json("metrology.json", body);
}

void cmd_synth(const Context& ctx) {
    const auto& s = ctx.cfg.synth;
    const std::uint64_t seed = ctx.cfg.seed;
    if (s.crossing) {
        const auto& c = *s.crossing;
        CrossingSynthSpec spec{c.g_rf, c.ef_intercept, c.ef_slope, c.s_intercept, c.s_slope,
                               c.linewidth, c.flux_offsets, c.probe_freqs};
        ctx.csv("synth_crossing.csv", crossing_table(synth_crossing(spec, {derive_seed(seed, 0), c.noise})));
    }
    if (s.phase_track) {
        const auto& c = *s.phase_track;
        PhaseSynthSpec spec{c.delta_f, c.dt, c.samples, c.phi0, c.a0, c.a1_max, c.T2};
        std::vector<double> volts = c.voltages;
        if (volts.empty()) {
            for (std::size_t i = 0; i < c.delta_f.size(); ++i) volts.push_back(static_cast<double>(i));
        }
        ctx.csv("synth_phase_track.csv",
                phase_track_table(synth_phase_track(spec, {derive_seed(seed, 1), c.noise}), volts));
    }
    if (s.iq) {
        const auto& c = *s.iq;
        for (std::size_t k = 0; k < c.prepared.size(); ++k) {
            const auto& [label, p_g] = c.prepared[k];
            const auto shots = synth_iq_shots(c.r_g, c.r_e, c.sigma, p_g, c.n_shots,
                                              {derive_seed(seed, 2 + 16 * (k + 1)), 0.0});
            ctx.csv(fmt::format("synth_iq_{}.csv", label), iq_table(shots));
        }
    }
    if (s.decay) {
        const auto& c = *s.decay;
        ctx.csv("synth_decay.csv",
                decay_table(synth_decay_series(c.tau, c.amplitude, c.offset, c.delays,
                                               {derive_seed(seed, 3), c.noise})));
    }
}

void dispatch(const Context& ctx) {
    const auto& c = ctx.opts.command;
    if (c == "spectrum") return cmd_spectrum(ctx);
    if (c == "matrix-elements") return cmd_matrix_elements(ctx);
    if (c == "find-resonance") return cmd_find_resonance(ctx);
    if (c == "simulate-init") return cmd_simulate_init(ctx);
    if (c == "error-map") return cmd_error_map(ctx);
    if (c == "leakage-removal") return cmd_leakage_removal(ctx);
    if (c == "steady-state") return cmd_steady_state(ctx);
    if (c == "fit-crossing") return cmd_fit_crossing(ctx);
    if (c == "fit-decay") return cmd_fit_decay(ctx);
    if (c == "extract-spectrum") return cmd_extract_spectrum(ctx);
    if (c == "metrology") return cmd_metrology(ctx);
    if (c == "synth") return cmd_synth(ctx);
    throw ValidationError({fmt::format("unknown subcommand '{}'", c)});
}

void error_record(std::ostream& err, const std::string& command, const std::string& kind,
                  const std::string& message, const std::vector<std::string>& problems) {
    ojson rec = {{"error", {{"command", command}, {"kind", kind}, {"message", message}}}};
    if (!problems.empty()) rec["error"]["problems"] = problems;
    err << rec.dump() << '\n';
}

}  // namespace

int run(const CliOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        if (opts.jobs < 1) throw ValidationError({fmt::format("--jobs must be >= 1 (got {})", opts.jobs)});
        RunConfig cfg = load_config(opts.config);
        if (opts.seed) {
            cfg.seed = *opts.seed;
            cfg.canonical += fmt::format("#seed={}", cfg.seed);
            cfg.hash = fnv1a64(cfg.canonical);
        }
        require_for_command(cfg, opts.command);

        fs::path out_dir = ".";
        if (opts.out) {
            out_dir = *opts.out;
        } else if (const char* env = std::getenv("FLUXINIT_OUT_DIR"); env && *env) {
            out_dir = env;
        } else if (!cfg.output_dir.empty()) {
            out_dir = cfg.output_dir.lexically_normal();
        }
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) {
            throw Error(ErrorKind::Io,
                        fmt::format("cannot create output directory '{}': {}", out_dir.string(), ec.message()));
        }
        const Context ctx{opts, cfg, out_dir, Provenance{cfg.hash, opts.command}, out};
        dispatch(ctx);
        return 0;
    } catch (const ValidationError& e) {
        error_record(err, opts.command, to_string(e.kind()), e.what(), e.problems());
        return 2;
    } catch (const Error& e) {
        error_record(err, opts.command, to_string(e.kind()), e.what(), {});
        return 1;
    } catch (const std::exception& e) {
        error_record(err, opts.command, "internal", e.what(), {});
        return 1;
    }
}

int cli_main(int argc, char** argv) {
    CLI::App app{"fluxinit: fluxonium initialization simulator and calibration toolkit"};
    app.require_subcommand(1);
    CliOptions opts;
    std::string out_dir;
    std::uint64_t seed = 0;
    for (const auto& name : kSubcommands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", opts.config, "JSON run configuration")->required();
        sub->add_option("--out", out_dir, "output directory (overrides FLUXINIT_OUT_DIR and output.dir)");
        sub->add_option("--jobs", opts.jobs, "parallel tasks for sweeps")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "random seed (overrides config)");
        sub->add_flag("--quiet", opts.quiet, "suppress progress messages");
        sub->callback([&opts, name] { opts.command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    for (const auto* sub : app.get_subcommands()) {
        if (sub->count("--out")) opts.out = out_dir;
        if (sub->count("--seed")) opts.seed = seed;
    }
    return run(opts, std::cout, std::cerr);
}

}  // namespace fluxinit
