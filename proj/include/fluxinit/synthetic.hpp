#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fluxinit/crossing_fit.hpp"
#include "fluxinit/phase_spectroscopy.hpp"
#include "fluxinit/readout.hpp"

namespace fluxinit {

/// Seeded generator with a fixed algorithm, identical on every platform:
/// std::mt19937_64 (fully specified by the standard), uniforms from the top
/// 53 bits, normals by the Box-Muller transform (both values used in turn).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform();  // [0, 1)
    double normal();   // N(0, 1)
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct NoiseSpec {
    std::uint64_t seed = 0;
    double amplitude = 0.0;  // Gaussian standard deviation in channel units

    void validate() const;
};

struct CrossingSynthSpec {
    double g_rf = 0.056;
    double ef_intercept = 0.0;  // GHz at zero flux offset
    double ef_slope = 0.0;      // GHz / rad
    double s_intercept = 0.0;
    double s_slope = 0.0;
    double linewidth = 0.004;   // Lorentzian half width, GHz
    std::vector<double> flux_offsets;
    std::vector<double> probe_freqs;
};

/// Sum of two unit Lorentzians centred on E+ and E- per flux column, plus noise.
CrossingDataset synth_crossing(const CrossingSynthSpec& spec, const NoiseSpec& noise);

struct PhaseSynthSpec {
    std::vector<double> delta_f;  // f_ge(V_i) - f_ge(0) per amplitude, GHz
    double dt = 1.0;              // ns
    int samples = 100;            // t = 0, dt, ..., (samples-1) dt
    double phi0 = 0.0;
    double a0 = 0.5;
    double a1_max = 0.4;
    double T2 = 0.0;              // ns; <= 0 means no decay
};

/// P_k = a0 - a1(t) cos(phi_sq + theta_k) with phi_sq = -2 pi delta_f t + phi0 and
/// a1(t) = a1_max exp(-t/T2); noise added then clamped to [0, 1].
PhaseTrack synth_phase_track(const PhaseSynthSpec& spec, const NoiseSpec& noise);

/// round(p_g n) shots around r_g then the rest around r_e, isotropic sigma.
/// NoiseSpec.amplitude is unused; sigma sets the cloud width.
std::vector<IQPoint> synth_iq_shots(IQPoint r_g, IQPoint r_e, double sigma, double p_g,
                                    std::size_t n_shots, const NoiseSpec& noise);

struct DecaySeries {
    std::vector<double> delays;  // ns
    std::vector<double> shifts;  // GHz
};

/// amplitude exp(-t/tau) + offset on the delay grid, plus noise.
DecaySeries synth_decay_series(double tau, double amplitude, double offset,
                               const std::vector<double>& delays, const NoiseSpec& noise);

}  // namespace fluxinit
