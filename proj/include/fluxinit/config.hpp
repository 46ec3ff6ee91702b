#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fluxinit/circuit_spectrum.hpp"
#include "fluxinit/pulse_shaping.hpp"
#include "fluxinit/readout.hpp"

namespace fluxinit {

struct DeviceConfig {
    CircuitParams circuit{0.0, 0.0, 0.0, std::numbers::pi};
    double omega_r = 0.0;        // GHz
    double g_coupled = 0.0;      // g_rf (red) or g_rh (blue), GHz
    double Gamma = 1.0 / 40.0;   // 1/ns
    TripleKind triple = TripleKind::Red;
    int basis_dim = kDefaultBasisDim;
    std::optional<double> flux_offset;  // rad; found by bisection when absent
};

struct ScheduleConfig {
    double omega_plateau = 0.0;  // GHz
    std::vector<double> lambdas = kDefaultLambdas;
    double theta_f = std::numbers::pi / 4.0;
    double T = 500.0;
    double T_pre = 10.0;
    double dt = 0.1;
    double output_dt = 1.0;
};

struct SweepConfig {
    std::vector<double> omegas;        // GHz
    std::vector<double> durations;     // ns
    std::vector<double> t_pre;         // ns
    std::vector<double> flux_offsets;  // rad
    int levels = 6;
};

struct NumericsConfig {
    bool full_model = false;
    double full_dt = 0.005;
    int photon_dim = 4;
    int fluxonium_levels = 6;
    bool lab_frame = false;
    double lab_dt = 0.005;
    double decay_min_duration = 300.0;
};

struct SteadyStateConfig {
    double n_th = 0.177;
    double T1_us = 35.6;
    std::vector<double> omegas;  // GHz
};

struct CalibrationConfig {
    std::filesystem::path crossing;
    std::filesystem::path decay;
    std::filesystem::path phase_track;
    double max_residual_rms = 0.01;
    double f_ge_at_zero = 0.0;
    double flux_at_zero = std::numbers::pi;
    double flux_per_volt = 1.0;
    std::optional<CircuitParams> initial;
};

struct MetrologyConfig {
    std::vector<std::filesystem::path> calibration_shots;  // ground-prepared first
    std::filesystem::path after_init_g;
    std::filesystem::path after_init_e;
    double rabi_contrast = 0.0;
    std::optional<IQPoint> r_f;
    std::optional<double> e_down;
};

struct SynthCrossingConfig {
    double g_rf = 0.056;
    double ef_intercept = 0.0, ef_slope = 0.0, s_intercept = 0.0, s_slope = 0.0;
    double linewidth = 0.004;
    std::vector<double> flux_offsets, probe_freqs;
    double noise = 0.0;
};

struct SynthPhaseConfig {
    std::vector<double> delta_f;
    std::vector<double> voltages;
    double dt = 1.0;
    int samples = 100;
    double phi0 = 0.0, a0 = 0.5, a1_max = 0.4, T2 = 0.0;
    double noise = 0.0;
};

struct SynthIqConfig {
    IQPoint r_g{0.0, 0.0};
    IQPoint r_e{3.0, 0.0};
    double sigma = 1.0;
    std::vector<std::pair<std::string, double>> prepared;  // label, ground fraction
    std::size_t n_shots = 10000;
};

struct SynthDecayConfig {
    double tau = 40.0, amplitude = -0.002, offset = 0.0;
    std::vector<double> delays;
    double noise = 0.0;
};

struct SynthConfig {
    std::optional<SynthCrossingConfig> crossing;
    std::optional<SynthPhaseConfig> phase_track;
    std::optional<SynthIqConfig> iq;
    std::optional<SynthDecayConfig> decay;
};

/// Parsed and validated run configuration. Sections that are absent keep defaults
/// and a has_* flag stays false.
struct RunConfig {
    bool has_device = false, has_schedule = false, has_sweep = false, has_steady_state = false,
         has_calibration = false, has_metrology = false, has_synth = false;
    DeviceConfig device;
    ScheduleConfig schedule;
    SweepConfig sweep;
    NumericsConfig numerics;
    SteadyStateConfig steady_state;
    CalibrationConfig calibration;
    MetrologyConfig metrology;
    SynthConfig synth;
    std::filesystem::path output_dir;
    std::uint64_t seed = 0;

    std::string canonical;  // canonical JSON text of the effective config
    std::uint64_t hash = 0;

    RampSpec ramp() const;
};

/// Parses JSON text; relative input paths resolve against `base_dir`. Every
/// violation (unknown key, wrong type, out-of-domain value) is collected and
/// thrown together as a ValidationError.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// Checks the sections a subcommand needs, listing every problem.
void require_for_command(const RunConfig& cfg, const std::string& command);

}  // namespace fluxinit
