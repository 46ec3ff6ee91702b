#include "fluxinit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "fluxinit/errors.hpp"
#include "fluxinit/reduced_model.hpp"
#include "fluxinit/units.hpp"

namespace fluxinit {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 == 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    has_spare_ = true;
    return r * std::cos(kTwoPi * u2);
}

void NoiseSpec::validate() const {
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
        throw Error(ErrorKind::ParameterDomain,
                    fmt::format("noise amplitude must be finite and >= 0 (got {})", amplitude));
    }
}

CrossingDataset synth_crossing(const CrossingSynthSpec& spec, const NoiseSpec& noise) {
    noise.validate();
    if (!(spec.linewidth > 0.0)) throw Error(ErrorKind::ParameterDomain, "linewidth must be > 0");
    CrossingDataset data;
    data.flux_offsets = spec.flux_offsets;
    data.probe_freqs = spec.probe_freqs;
    data.amplitude.resize(static_cast<Eigen::Index>(spec.probe_freqs.size()),
                          static_cast<Eigen::Index>(spec.flux_offsets.size()));
    Rng rng(noise.seed);
    const double w2 = spec.linewidth * spec.linewidth;
    for (std::size_t c = 0; c < spec.flux_offsets.size(); ++c) {
        const double d = spec.flux_offsets[c];
        const auto [hi, lo] = avoided_crossing_energies(spec.ef_intercept + spec.ef_slope * d,
                                                        spec.s_intercept + spec.s_slope * d, spec.g_rf);
        for (std::size_t r = 0; r < spec.probe_freqs.size(); ++r) {
            const double f = spec.probe_freqs[r];
            double v = w2 / ((f - hi) * (f - hi) + w2) + w2 / ((f - lo) * (f - lo) + w2);
            if (noise.amplitude > 0.0) v += noise.amplitude * rng.normal();
            data.amplitude(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    }
    data.validate();
    return data;
}

PhaseTrack synth_phase_track(const PhaseSynthSpec& spec, const NoiseSpec& noise) {
    noise.validate();
    if (!(spec.dt > 0.0) || spec.samples < 2) {
        throw Error(ErrorKind::ParameterDomain, "phase track needs dt > 0 and >= 2 samples");
    }
    Rng rng(noise.seed);
    PhaseTrack track;
    track.dt = spec.dt;
    for (double df : spec.delta_f) {
        PhaseSeries s;
        for (int k = 0; k < spec.samples; ++k) {
            const double t = k * spec.dt;
            const double a1 = spec.T2 > 0.0 ? spec.a1_max * std::exp(-t / spec.T2) : spec.a1_max;
            const double phi = -kTwoPi * df * t + spec.phi0;
            auto p = three_angle_forward(spec.a0, a1, phi);
            for (double& v : p) {
                if (noise.amplitude > 0.0) v += noise.amplitude * rng.normal();
                v = std::clamp(v, 0.0, 1.0);
            }
            s.t.push_back(t);
            s.p1.push_back(p[0]);
            s.p2.push_back(p[1]);
            s.p3.push_back(p[2]);
        }
        track.amplitudes.push_back(std::move(s));
    }
    return track;
}

std::vector<IQPoint> synth_iq_shots(IQPoint r_g, IQPoint r_e, double sigma, double p_g,
                                    std::size_t n_shots, const NoiseSpec& noise) {
    if (!(sigma >= 0.0) || !(p_g >= 0.0 && p_g <= 1.0)) {
        throw Error(ErrorKind::ParameterDomain,
                    fmt::format("synth_iq_shots: need sigma >= 0 and p_g in [0, 1] (got {}, {})",
                                sigma, p_g));
    }
    Rng rng(noise.seed);
    const auto n_g = static_cast<std::size_t>(std::llround(p_g * static_cast<double>(n_shots)));
    std::vector<IQPoint> out;
    out.reserve(n_shots);
    for (std::size_t k = 0; k < n_shots; ++k) {
        const IQPoint c = k < n_g ? r_g : r_e;
        const double x = rng.normal();
        const double y = rng.normal();
        out.emplace_back(c.real() + sigma * x, c.imag() + sigma * y);
    }
    return out;
}

DecaySeries synth_decay_series(double tau, double amplitude, double offset,
                               const std::vector<double>& delays, const NoiseSpec& noise) {
    noise.validate();
    if (!(tau > 0.0)) throw Error(ErrorKind::ParameterDomain, "synth_decay_series: tau must be > 0");
    Rng rng(noise.seed);
    DecaySeries s;
    s.delays = delays;
    for (double t : delays) {
        double v = amplitude * std::exp(-t / tau) + offset;
        if (noise.amplitude > 0.0) v += noise.amplitude * rng.normal();
        s.shifts.push_back(v);
    }
    return s;
}

}  // namespace fluxinit
