#include "fluxinit/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "fluxinit/csv.hpp"
#include "fluxinit/errors.hpp"

namespace fluxinit {

using nlohmann::json;

namespace {

// Typed access to one JSON object; records every problem and flags unread keys.
class Section {
public:
    Section(const json& j, std::string path, std::vector<std::string>& problems)
        : j_(j), path_(std::move(path)), problems_(problems) {
        if (!j_.is_object()) problem("", "must be an object");
    }

    bool has(const char* key) {
        seen_.insert(key);
        return j_.is_object() && j_.contains(key) && !j_.at(key).is_null();
    }

    void number(const char* key, double& out, bool required = false) {
        if (!has(key)) return missing(key, required);
        const auto& v = j_.at(key);
        if (!v.is_number()) return problem(key, "must be a number");
        out = v.get<double>();
        if (!std::isfinite(out)) problem(key, "must be finite");
    }

    void optional_number(const char* key, std::optional<double>& out) {
        if (!has(key)) return;
        double v = 0.0;
        number(key, v);
        out = v;
    }

    void integer(const char* key, int& out) {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number_integer()) return problem(key, "must be an integer");
        out = v.get<int>();
    }

    void count(const char* key, std::size_t& out) {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_number_unsigned()) return problem(key, "must be a non-negative integer");
        out = v.get<std::size_t>();
    }

    void boolean(const char* key, bool& out) {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_boolean()) return problem(key, "must be true or false");
        out = v.get<bool>();
    }

    void string(const char* key, std::string& out, bool required = false) {
        if (!has(key)) return missing(key, required);
        const auto& v = j_.at(key);
        if (!v.is_string()) return problem(key, "must be a string");
        out = v.get<std::string>();
    }

    void path(const char* key, std::filesystem::path& out, const std::filesystem::path& base) {
        std::string s;
        string(key, s);
        if (!s.empty()) {
            std::filesystem::path p(s);
            out = p.is_absolute() ? p : base / p;
        }
    }

    void numbers(const char* key, std::vector<double>& out) {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_array()) return problem(key, "must be an array of numbers");
        out.clear();
        for (const auto& e : v) {
            if (!e.is_number()) return problem(key, "must be an array of numbers");
            out.push_back(e.get<double>());
        }
    }

    // An explicit array, {start, stop, count} (inclusive linspace) or {start, stop, step}.
    void grid(const char* key, std::vector<double>& out) {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (v.is_array()) {
            numbers(key, out);
        } else if (v.is_object()) {
            Section g(v, join(key), problems_);
            double start = 0.0, stop = 0.0, step = 0.0;
            std::size_t n = 0;
            g.number("start", start, true);
            g.number("stop", stop, true);
            const bool by_count = g.has("count");
            const bool by_step = g.has("step");
            g.count("count", n);
            g.number("step", step);
            g.finish();
            out.clear();
            if (by_count == by_step) {
                problem(key, "grid needs exactly one of 'count' or 'step'");
            } else if (by_count) {
                for (std::size_t k = 0; k < n; ++k) {
                    out.push_back(n == 1 ? start
                                         : start + (stop - start) * static_cast<double>(k) /
                                                       static_cast<double>(n - 1));
                }
            } else if (!(step > 0.0) || stop < start) {
                problem(key, "grid step must be > 0 with stop >= start");
            } else {
                const auto m = static_cast<long>(std::floor((stop - start) / step + 1e-9));
                for (long k = 0; k <= m; ++k) out.push_back(start + static_cast<double>(k) * step);
            }
        } else {
            return problem(key, "must be an array or a {start, stop, count|step} object");
        }
        for (double x : out) {
            if (!std::isfinite(x)) return problem(key, "grid values must be finite");
        }
    }

    void point(const char* key, IQPoint& out) {
        if (!has(key)) return;
        const auto& v = j_.at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            return problem(key, "must be a [i, q] pair");
        }
        out = {v[0].get<double>(), v[1].get<double>()};
    }

    const json& child(const char* key) {
        seen_.insert(key);
        return j_.at(key);
    }

    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    void problem(const std::string& key, const std::string& what) {
        problems_.push_back(fmt::format("{}: {}", key.empty() ? path_ : join(key), what));
    }

    void finish() {
        if (!j_.is_object()) return;
        for (const auto& [k, _] : j_.items()) {
            if (!seen_.count(k)) problems_.push_back(fmt::format("{}: unknown key", join(k)));
        }
    }

private:
    void missing(const char* key, bool required) {
        if (required) problem(key, "is required");
    }

    const json& j_;
    std::string path_;
    std::vector<std::string>& problems_;
    std::set<std::string> seen_;
};

void parse_device(Section& s, DeviceConfig& d) {
    s.number("E_C", d.circuit.E_C, true);
    s.number("E_L", d.circuit.E_L, true);
    s.number("E_J", d.circuit.E_J, true);
    s.number("phi_ext", d.circuit.phi_ext);
    s.number("omega_r", d.omega_r, true);
    const bool rf = s.has("g_rf");
    const bool rh = s.has("g_rh");
    if (rf && rh) s.problem("g_rf", "give only one of g_rf or g_rh");
    if (rf) s.number("g_rf", d.g_coupled);
    if (rh) s.number("g_rh", d.g_coupled);
    if (!rf && !rh) s.problem("g_rf", "one of g_rf or g_rh is required");
    s.number("Gamma", d.Gamma);
    std::string triple = to_string(d.triple);
    s.string("triple", triple);
    if (triple == "red" || triple == "blue") {
        d.triple = triple_kind_from_string(triple);
    } else {
        s.problem("triple", fmt::format("must be 'red' or 'blue' (got '{}')", triple));
    }
    if (rh && d.triple == TripleKind::Red) s.problem("g_rh", "g_rh belongs to the blue triple");
    if (rf && d.triple == TripleKind::Blue) s.problem("g_rf", "g_rf belongs to the red triple");
    s.integer("basis_dim", d.basis_dim);
    s.optional_number("flux_offset", d.flux_offset);
    s.finish();

    for (auto [name, v] : {std::pair{"E_C", d.circuit.E_C}, std::pair{"E_L", d.circuit.E_L},
                           std::pair{"E_J", d.circuit.E_J}}) {
        if (!(v > 0.0)) s.problem(name, fmt::format("must be > 0 (got {})", v));
    }
    if (!(d.omega_r > 0.0)) s.problem("omega_r", "must be > 0");
    if (!(d.g_coupled >= 0.0)) s.problem(d.triple == TripleKind::Red ? "g_rf" : "g_rh", "must be >= 0");
    if (!(d.Gamma >= 0.0)) s.problem("Gamma", "must be >= 0");
    if (d.basis_dim < kMinBasisDim) {
        s.problem("basis_dim", fmt::format("must be >= {} (got {})", kMinBasisDim, d.basis_dim));
    }
}

void parse_schedule(Section& s, ScheduleConfig& c) {
    s.number("Omega", c.omega_plateau, true);
    s.numbers("lambdas", c.lambdas);
    s.number("theta_f", c.theta_f);
    s.number("T", c.T);
    s.number("T_pre", c.T_pre);
    s.number("dt", c.dt);
    s.number("output_dt", c.output_dt);
    s.finish();
    if (!(c.omega_plateau >= 0.0)) s.problem("Omega", "must be >= 0");
    if (!(c.T_pre >= 0.0)) s.problem("T_pre", "must be >= 0");
    RampSpec ramp{c.lambdas, c.theta_f, c.T, c.dt};
    try {
        ramp.validate();
        if (!(theta_p_plateau(ramp) < 0.5 * std::numbers::pi)) {
            s.problem("theta_f", "theta_f * sum(lambdas) must be < pi/2");
        }
    } catch (const ValidationError& e) {
        for (const auto& p : e.problems()) s.problem("", p);
    }
    if (!(c.output_dt > 0.0)) {
        s.problem("output_dt", "must be > 0");
    } else if (c.dt > 0.0) {
        const double r = c.output_dt / c.dt;
        if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r) || r < 1.0 - 1e-9) {
            s.problem("output_dt", "must be a positive multiple of dt");
        }
    }
}

void parse_sweep(Section& s, SweepConfig& c) {
    s.grid("omegas", c.omegas);
    s.grid("durations", c.durations);
    s.grid("t_pre", c.t_pre);
    s.grid("flux_offsets", c.flux_offsets);
    s.integer("levels", c.levels);
    s.finish();
    for (double w : c.omegas) {
        if (!(w >= 0.0)) s.problem("omegas", fmt::format("value {} must be >= 0", w));
    }
    for (double T : c.durations) {
        if (!(T > 0.0)) s.problem("durations", fmt::format("value {} must be > 0", T));
    }
    for (double t : c.t_pre) {
        if (!(t >= 0.0)) s.problem("t_pre", fmt::format("value {} must be >= 0", t));
    }
    if (c.levels < 1) s.problem("levels", "must be >= 1");
}

void parse_numerics(Section& s, NumericsConfig& c) {
    s.boolean("full_model", c.full_model);
    s.number("full_dt", c.full_dt);
    s.integer("photon_dim", c.photon_dim);
    s.integer("fluxonium_levels", c.fluxonium_levels);
    s.boolean("lab_frame", c.lab_frame);
    s.number("lab_dt", c.lab_dt);
    s.number("decay_min_duration", c.decay_min_duration);
    s.finish();
    if (!(c.full_dt > 0.0)) s.problem("full_dt", "must be > 0");
    if (!(c.lab_dt > 0.0)) s.problem("lab_dt", "must be > 0");
    if (c.photon_dim < 2) s.problem("photon_dim", "must be >= 2");
    if (c.fluxonium_levels < 4) s.problem("fluxonium_levels", "must be >= 4");
}

void parse_steady(Section& s, SteadyStateConfig& c) {
    s.number("n_th", c.n_th);
    s.number("T1_us", c.T1_us);
    s.grid("omegas", c.omegas);
    s.finish();
    if (!(c.n_th >= 0.0)) s.problem("n_th", "must be >= 0");
    if (!(c.T1_us > 0.0)) s.problem("T1_us", "must be > 0");
}

void parse_circuit(Section& s, CircuitParams& p) {
    s.number("E_C", p.E_C, true);
    s.number("E_L", p.E_L, true);
    s.number("E_J", p.E_J, true);
    s.finish();
    for (auto [name, v] : {std::pair{"E_C", p.E_C}, std::pair{"E_L", p.E_L}, std::pair{"E_J", p.E_J}}) {
        if (!(v > 0.0)) s.problem(name, "must be > 0");
    }
}

void parse_calibration(Section& s, CalibrationConfig& c, const std::filesystem::path& base,
                       std::vector<std::string>& problems) {
    s.path("crossing", c.crossing, base);
    s.path("decay", c.decay, base);
    s.path("phase_track", c.phase_track, base);
    s.number("max_residual_rms", c.max_residual_rms);
    s.number("f_ge_at_zero", c.f_ge_at_zero);
    s.number("flux_at_zero", c.flux_at_zero);
    s.number("flux_per_volt", c.flux_per_volt);
    if (s.has("initial")) {
        Section init(s.child("initial"), s.join("initial"), problems);
        CircuitParams p;
        parse_circuit(init, p);
        c.initial = p;
    }
    s.finish();
    if (!(c.max_residual_rms > 0.0)) s.problem("max_residual_rms", "must be > 0");
}

void parse_metrology(Section& s, MetrologyConfig& c, const std::filesystem::path& base) {
    if (s.has("calibration_shots")) {
        const auto& v = s.child("calibration_shots");
        if (!v.is_array() || v.size() < 2) {
            s.problem("calibration_shots", "must list >= 2 files, ground-prepared first");
        } else {
            for (const auto& e : v) {
                if (!e.is_string()) {
                    s.problem("calibration_shots", "entries must be strings");
                    continue;
                }
                std::filesystem::path p(e.get<std::string>());
                c.calibration_shots.push_back(p.is_absolute() ? p : base / p);
            }
        }
    }
    s.path("after_init_g", c.after_init_g, base);
    s.path("after_init_e", c.after_init_e, base);
    s.number("rabi_contrast", c.rabi_contrast);
    if (s.has("r_f")) {
        IQPoint p;
        s.point("r_f", p);
        c.r_f = p;
    }
    s.optional_number("e_down", c.e_down);
    s.finish();
    if (c.after_init_g.empty() != c.after_init_e.empty()) {
        s.problem("after_init_g", "after_init_g and after_init_e must be given together");
    }
}

void parse_synth(Section& s, SynthConfig& c, std::vector<std::string>& problems) {
    if (s.has("crossing")) {
        Section x(s.child("crossing"), s.join("crossing"), problems);
        SynthCrossingConfig k;
        x.number("g_rf", k.g_rf);
        x.number("ef_intercept", k.ef_intercept, true);
        x.number("ef_slope", k.ef_slope, true);
        x.number("s_intercept", k.s_intercept, true);
        x.number("s_slope", k.s_slope, true);
        x.number("linewidth", k.linewidth);
        x.grid("flux_offsets", k.flux_offsets);
        x.grid("probe_freqs", k.probe_freqs);
        x.number("noise", k.noise);
        x.finish();
        if (k.flux_offsets.empty()) x.problem("flux_offsets", "grid is required");
        if (k.probe_freqs.size() < 3) x.problem("probe_freqs", "grid needs >= 3 points");
        if (!(k.linewidth > 0.0)) x.problem("linewidth", "must be > 0");
        if (!(k.noise >= 0.0)) x.problem("noise", "must be >= 0");
        c.crossing = k;
    }
    if (s.has("phase_track")) {
        Section x(s.child("phase_track"), s.join("phase_track"), problems);
        SynthPhaseConfig k;
        x.numbers("delta_f", k.delta_f);
        x.numbers("voltages", k.voltages);
        x.number("dt", k.dt);
        x.integer("samples", k.samples);
        x.number("phi0", k.phi0);
        x.number("a0", k.a0);
        x.number("a1_max", k.a1_max);
        x.number("T2", k.T2);
        x.number("noise", k.noise);
        x.finish();
        if (k.delta_f.empty()) x.problem("delta_f", "needs >= 1 amplitude");
        if (!k.voltages.empty() && k.voltages.size() != k.delta_f.size()) {
            x.problem("voltages", "length must match delta_f");
        }
        if (!(k.dt > 0.0)) x.problem("dt", "must be > 0");
        if (k.samples < 2) x.problem("samples", "must be >= 2");
        if (!(k.noise >= 0.0)) x.problem("noise", "must be >= 0");
        c.phase_track = k;
    }
    if (s.has("iq")) {
        Section x(s.child("iq"), s.join("iq"), problems);
        SynthIqConfig k;
        x.point("r_g", k.r_g);
        x.point("r_e", k.r_e);
        x.number("sigma", k.sigma);
        x.count("n_shots", k.n_shots);
        if (x.has("prepared")) {
            const auto& v = x.child("prepared");
            if (!v.is_object() || v.empty()) {
                x.problem("prepared", "must map labels to ground fractions");
            } else {
                for (const auto& [label, p] : v.items()) {
                    if (!p.is_number() || !(p.get<double>() >= 0.0 && p.get<double>() <= 1.0)) {
                        x.problem("prepared." + label, "must be a number in [0, 1]");
                        continue;
                    }
                    k.prepared.emplace_back(label, p.get<double>());
                }
            }
        } else {
            x.problem("prepared", "is required");
        }
        x.finish();
        if (!(k.sigma >= 0.0)) x.problem("sigma", "must be >= 0");
        c.iq = k;
    }
    if (s.has("decay")) {
        Section x(s.child("decay"), s.join("decay"), problems);
        SynthDecayConfig k;
        x.number("tau", k.tau);
        x.number("amplitude", k.amplitude);
        x.number("offset", k.offset);
        x.grid("delays", k.delays);
        x.number("noise", k.noise);
        x.finish();
        if (!(k.tau > 0.0)) x.problem("tau", "must be > 0");
        if (k.delays.empty()) x.problem("delays", "grid is required");
        if (!(k.noise >= 0.0)) x.problem("noise", "must be >= 0");
        c.decay = k;
    }
    s.finish();
}

}  // namespace

RampSpec RunConfig::ramp() const { return {schedule.lambdas, schedule.theta_f, schedule.T, schedule.dt}; }

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError({fmt::format("config is not valid JSON: {}", e.what())});
    }
    std::vector<std::string> problems;
    RunConfig cfg;
    Section top(root, "", problems);
    if (top.has("device")) {
        cfg.has_device = true;
        Section s(top.child("device"), "device", problems);
        parse_device(s, cfg.device);
    }
    if (top.has("schedule")) {
        cfg.has_schedule = true;
        Section s(top.child("schedule"), "schedule", problems);
        parse_schedule(s, cfg.schedule);
    }
    if (top.has("sweep")) {
        cfg.has_sweep = true;
        Section s(top.child("sweep"), "sweep", problems);
        parse_sweep(s, cfg.sweep);
    }
    if (top.has("numerics")) {
        Section s(top.child("numerics"), "numerics", problems);
        parse_numerics(s, cfg.numerics);
    }
    if (top.has("steady_state")) {
        cfg.has_steady_state = true;
        Section s(top.child("steady_state"), "steady_state", problems);
        parse_steady(s, cfg.steady_state);
    }
    if (top.has("calibration")) {
        cfg.has_calibration = true;
        Section s(top.child("calibration"), "calibration", problems);
        parse_calibration(s, cfg.calibration, base_dir, problems);
    }
    if (top.has("metrology")) {
        cfg.has_metrology = true;
        Section s(top.child("metrology"), "metrology", problems);
        parse_metrology(s, cfg.metrology, base_dir);
    }
    if (top.has("synth")) {
        cfg.has_synth = true;
        Section s(top.child("synth"), "synth", problems);
        parse_synth(s, cfg.synth, problems);
    }
    if (top.has("output")) {
        Section s(top.child("output"), "output", problems);
        s.path("dir", cfg.output_dir, base_dir);
        s.finish();
    }
    if (top.has("seed")) {
        const auto& v = top.child("seed");
        if (!v.is_number_unsigned()) {
            problems.emplace_back("seed: must be a non-negative integer");
        } else {
            cfg.seed = v.get<std::uint64_t>();
        }
    }
    top.finish();
    if (!problems.empty()) throw ValidationError(std::move(problems));

    // Output location does not affect results and stays out of the hash.
    json body = root;
    body.erase("output");
    cfg.canonical = body.dump();
    cfg.hash = fnv1a64(cfg.canonical);
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, fmt::format("cannot read config '{}'", path.string()));
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

void require_for_command(const RunConfig& cfg, const std::string& command) {
    std::vector<std::string> problems;
    auto need = [&](bool ok, const std::string& what) {
        if (!ok) problems.push_back(fmt::format("{}: {}", command, what));
    };
    const bool sim = command == "simulate-init" || command == "error-map" ||
                     command == "leakage-removal" || command == "steady-state";
    if (sim || command == "spectrum" || command == "matrix-elements" || command == "find-resonance") {
        need(cfg.has_device, "a 'device' section is required");
    }
    if (command == "simulate-init" || command == "leakage-removal") {
        need(cfg.has_schedule, "a 'schedule' section is required");
    }
    if (command == "matrix-elements") {
        need(!cfg.sweep.flux_offsets.empty(), "sweep.flux_offsets must be a non-empty grid");
    }
    if (command == "error-map" || command == "steady-state") {
        need(!cfg.sweep.durations.empty(), "sweep.durations must be a non-empty grid");
    }
    if (command == "error-map") {
        need(!cfg.sweep.omegas.empty(), "sweep.omegas must be a non-empty grid");
    }
    if (command == "steady-state") {
        need(cfg.has_steady_state, "a 'steady_state' section is required");
        need(!cfg.steady_state.omegas.empty(), "steady_state.omegas must be a non-empty grid");
    }
    if (command == "leakage-removal") {
        need(!cfg.sweep.t_pre.empty(), "sweep.t_pre must be a non-empty grid");
    }
    if (command == "fit-crossing") need(!cfg.calibration.crossing.empty(), "calibration.crossing is required");
    if (command == "fit-decay") need(!cfg.calibration.decay.empty(), "calibration.decay is required");
    if (command == "extract-spectrum") {
        need(!cfg.calibration.phase_track.empty(), "calibration.phase_track is required");
        need(cfg.calibration.f_ge_at_zero > 0.0, "calibration.f_ge_at_zero must be > 0");
        need(cfg.calibration.initial.has_value(), "calibration.initial is required");
    }
    if (command == "metrology") {
        need(cfg.metrology.calibration_shots.size() >= 2, "metrology.calibration_shots needs >= 2 files");
    }
    if (command == "synth") {
        need(cfg.synth.crossing || cfg.synth.phase_track || cfg.synth.iq || cfg.synth.decay,
             "the 'synth' section must define at least one generator");
    }
    if (!problems.empty()) throw ValidationError(std::move(problems));
}

}  // namespace fluxinit
