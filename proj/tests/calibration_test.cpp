#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "fluxinit/circuit_spectrum.hpp"
#include "fluxinit/crossing_fit.hpp"
#include "fluxinit/decay_fit.hpp"
#include "fluxinit/errors.hpp"
#include "fluxinit/phase_spectroscopy.hpp"
#include "fluxinit/readout.hpp"
#include "fluxinit/reduced_model.hpp"
#include "fluxinit/spectrum_fit.hpp"
#include "fluxinit/synthetic.hpp"
#include "support.hpp"

using namespace fluxinit;
using fluxinit::testing::Draws;
using fluxinit::testing::kQubitA;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> steps(double lo, double hi, double step) {
    std::vector<double> v;
    for (int k = 0; lo + k * step <= hi + 1e-9; ++k) v.push_back(lo + k * step);
    return v;
}

CrossingSynthSpec crossing_spec(double g, double centre, double ef_slope, double s_slope) {
    CrossingSynthSpec s;
    s.g_rf = g;
    s.ef_intercept = centre;
    s.s_intercept = centre;
    s.ef_slope = ef_slope;
    s.s_slope = s_slope;
    s.flux_offsets = steps(-0.15, 0.15, 0.01);
    s.probe_freqs = steps(centre - 0.45, centre + 0.45, 0.001);
    return s;
}

// Three-angle populations for an explicit phase track phi(t).
PhaseSeries series_from_phase(const std::vector<double>& t, double df, double phi0) {
    PhaseSeries s;
    s.t = t;
    for (double tk : t) {
        const auto p = three_angle_forward(0.5, 0.4, 2.0 * kPi * df * tk + phi0);
        s.p1.push_back(p[0]);
        s.p2.push_back(p[1]);
        s.p3.push_back(p[2]);
    }
    return s;
}

IQShotSet two_sets(IQPoint rg, IQPoint re, double sigma, double pg_ground, double pg_excited,
                   std::size_t n, std::uint64_t seed) {
    IQShotSet set;
    set.labels = {"ground", "excited"};
    set.shots.push_back(synth_iq_shots(rg, re, sigma, pg_ground, n, NoiseSpec{seed, 0.0}));
    set.shots.push_back(synth_iq_shots(rg, re, sigma, pg_excited, n, NoiseSpec{seed + 1, 0.0}));
    return set;
}

}  // namespace

// Avoided crossing.

TEST(CrossingFit, RecoversGapNoiseless) {
    const auto spec = crossing_spec(0.056, 1.83, -1.166, -2.38);
    const auto fit = fit_avoided_crossing(synth_crossing(spec, NoiseSpec{1, 0.0}));
    EXPECT_NEAR(fit.g_rf, 0.056, 1e-4);
    EXPECT_NEAR(fit.resonance_flux, 0.0, 1e-3);
    EXPECT_NEAR(fit.resonance_freq, 1.83, 1e-3);
    EXPECT_NEAR(fit.ef_slope, -1.166, 0.02);
    EXPECT_NEAR(fit.s_slope, -2.38, 0.02);
}

TEST(CrossingFit, RecoversQubitBLikeGap) {
    const auto spec = crossing_spec(0.077, 1.692, -1.2, -2.4);
    const auto fit = fit_avoided_crossing(synth_crossing(spec, NoiseSpec{2, 0.0}));
    EXPECT_NEAR(fit.g_rf, 0.077, 1e-3);
    EXPECT_NEAR(fit.resonance_freq, 1.692, 1e-3);
}

TEST(CrossingFit, NoisyRoundTrip) {
    const auto spec = crossing_spec(0.056, 1.83, -1.166, -2.38);
    const auto fit = fit_avoided_crossing(synth_crossing(spec, NoiseSpec{2024, 0.01}));
    EXPECT_NEAR(fit.g_rf, 0.056, 1e-3);
    EXPECT_GT(fit.g_uncertainty, 0.0);
}

TEST(CrossingFit, ZeroCouplingGivesNoGap) {
    const auto spec = crossing_spec(0.0, 1.83, -1.166, -2.38);
    const auto fit = fit_avoided_crossing(synth_crossing(spec, NoiseSpec{3, 0.0}));
    EXPECT_LT(fit.g_rf, spec.linewidth);
}

TEST(CrossingFit, PeaksMatchAvoidedCrossingEnergies) {
    const auto spec = crossing_spec(0.056, 1.83, -1.166, -2.38);
    const auto peaks = extract_peaks(synth_crossing(spec, NoiseSpec{4, 0.0}));
    ASSERT_GE(peaks.size(), 25u);
    for (const auto& c : peaks) {
        const auto [hi, lo] = avoided_crossing_energies(1.83 - 1.166 * c.flux, 1.83 - 2.38 * c.flux, 0.056);
        EXPECT_NEAR(c.upper, hi, 1e-3) << c.flux;
        EXPECT_NEAR(c.lower, lo, 1e-3) << c.flux;
    }
}

TEST(CrossingFit, TooFewColumnsRejected) {
    auto spec = crossing_spec(0.056, 1.83, -1.166, -2.38);
    spec.flux_offsets = {-0.01, 0.0, 0.01};
    try {
        fit_avoided_crossing(synth_crossing(spec, NoiseSpec{5, 0.0}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::FitFailure);
    }
}

// Photon decay.

TEST(PhotonDecay, RecoversExponential) {
    const auto delays = steps(0.0, 300.0, 5.0);
    const auto data = synth_decay_series(40.0, -0.002, 0.0, delays, NoiseSpec{0, 0.0});
    const auto fit = fit_photon_decay(data.delays, data.shifts);
    EXPECT_NEAR(fit.tau, 40.0, 0.4);
    EXPECT_NEAR(fit.amplitude, -0.002, 1e-8);
    EXPECT_FALSE(fit.infinite_tau);
}

TEST(PhotonDecay, ConstantSeriesIsInfinite) {
    const auto delays = steps(0.0, 100.0, 10.0);
    const std::vector<double> flat(delays.size(), 0.003);
    const auto fit = fit_photon_decay(delays, flat);
    EXPECT_TRUE(fit.infinite_tau);
    EXPECT_TRUE(std::isinf(fit.tau));
}

TEST(PhotonDecay, GrowingSeriesRejected) {
    const auto delays = steps(0.0, 100.0, 10.0);
    std::vector<double> grow;
    for (double t : delays) grow.push_back(1e-3 * t);
    EXPECT_THROW(fit_photon_decay(delays, grow), Error);
    EXPECT_THROW(fit_photon_decay(std::vector<double>{0, 1, 2, 3}, std::vector<double>{4, 3, 2, 1}), Error);
}

TEST(PhotonDecay, FivePercentNoiseOverSeeds) {
    // Delays every 1 ns over 300 ns, noise sd 5% of the decay amplitude.
    const auto delays = steps(0.0, 300.0, 1.0);
    const double amplitude = -0.002;
    double mean = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto data = synth_decay_series(40.0, amplitude, 0.0, delays,
                                             NoiseSpec{seed, 0.05 * std::abs(amplitude)});
        const auto fit = fit_photon_decay(data.delays, data.shifts);
        EXPECT_NEAR(fit.tau, 40.0, 4.0) << "seed " << seed;
        mean += fit.tau / 100.0;
    }
    EXPECT_NEAR(mean, 40.0, 0.4);
}

// Three-angle phase spectroscopy.

TEST(ThreeAngle, WorkedExample) {
    const auto p = three_angle_forward(0.5, 0.3, 0.0);
    EXPECT_NEAR(p[0], 0.2, 1e-15);
    EXPECT_NEAR(p[1], 0.65, 1e-15);
    EXPECT_NEAR(p[2], 0.65, 1e-15);
    const auto s = solve_three_angle(0.2, 0.65, 0.65);
    EXPECT_NEAR(s.a0, 0.5, 1e-15);
    EXPECT_NEAR(s.a1, 0.3, 1e-15);
    EXPECT_NEAR(s.phi, 0.0, 1e-15);
}

TEST(ThreeAngle, ForwardMatchesDefinition) {
    const double a0 = 0.45, a1 = 0.2, phi = 1.1;
    const auto p = three_angle_forward(a0, a1, phi);
    EXPECT_NEAR(p[0], a0 - a1 * std::cos(phi), 1e-15);
    EXPECT_NEAR(p[1], a0 - a1 * std::cos(phi - 2.0 * kPi / 3.0), 1e-15);
    EXPECT_NEAR(p[2], a0 - a1 * std::cos(phi + 2.0 * kPi / 3.0), 1e-15);
}

TEST(ThreeAngle, RoundTripRandomDraws) {
    Draws d(99);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const double a0 = d.uniform(0.3, 0.7);
        const double a1 = d.uniform(0.01, 0.3);
        const double phi = d.uniform(-kPi + 1e-9, kPi);
        const auto p = three_angle_forward(a0, a1, phi);
        const auto s = solve_three_angle(p[0], p[1], p[2]);
        worst = std::max(worst, std::abs(std::remainder(s.phi - phi, 2.0 * kPi)));
        EXPECT_NEAR(s.a0, a0, 1e-12);
        EXPECT_NEAR(s.a1, a1, 1e-12);
        EXPECT_GT(s.phi, -kPi);
        EXPECT_LE(s.phi, kPi);
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(ThreeAngle, EqualPopulationsAreDegenerate) {
    try {
        solve_three_angle(0.4, 0.4, 0.4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DegenerateInput);
    }
}

// Frequency tracking.

TEST(FrequencyShift, TwentyMegahertzPhaseRamp) {
    // The objective wraps phi + 2 pi df t, so a phase advancing at +20 MHz is df = -20 MHz.
    const auto t = steps(0.0, 99.0, 1.0);
    PhaseTrack track;
    track.dt = 1.0;
    track.amplitudes.push_back(series_from_phase(t, 0.020, 0.3));
    const auto out = track_frequency(track, 0.7);
    EXPECT_NEAR(out.estimates[0].delta_f, -0.020, 1e-4);
    EXPECT_NEAR(out.estimates[0].phi0, 0.3, 1e-6);
    EXPECT_NEAR(out.f_ge[0], 0.68, 1e-4);
    EXPECT_FALSE(out.aliasing_suspected);
}

TEST(FrequencyShift, NoPulseNoShift) {
    const auto t = steps(0.0, 99.0, 1.0);
    PhaseTrack track;
    track.amplitudes.push_back(series_from_phase(t, 0.0, -1.0));
    const auto out = track_frequency(track, 0.7);
    EXPECT_NEAR(out.estimates[0].delta_f, 0.0, 1e-6);
    EXPECT_NEAR(out.f_ge[0], 0.7, 1e-6);
}

TEST(FrequencyShift, StaircaseAccumulates) {
    PhaseSynthSpec spec;
    for (int i = 1; i <= 10; ++i) spec.delta_f.push_back(-0.030 * i);
    spec.phi0 = 0.3;
    const auto out = track_frequency(synth_phase_track(spec, NoiseSpec{0, 0.0}), 0.697);
    ASSERT_EQ(out.f_ge.size(), 10u);
    for (int i = 0; i < 10; ++i) {
        EXPECT_NEAR(out.f_ge[i], 0.697 - 0.030 * (i + 1), 1e-6) << i;
        EXPECT_NEAR(out.steps[i], -0.030, 1e-6);
    }
    EXPECT_NEAR(out.f_ge.back(), 0.697 - 0.300, 1e-4);
    EXPECT_FALSE(out.ambiguous);
    EXPECT_FALSE(out.aliasing_suspected);
}

TEST(FrequencyShift, BeyondNyquistStillAccumulatesSteps) {
    // Absolute shifts far beyond f_s/2 alias per amplitude, but neighbour steps stay small.
    PhaseSynthSpec spec;
    spec.dt = 0.25;  // f_s = 4 GHz
    for (int i = 1; i <= 20; ++i) spec.delta_f.push_back(-0.15 * i);
    const auto out = track_frequency(synth_phase_track(spec, NoiseSpec{0, 0.0}), 5.0);
    EXPECT_NEAR(out.f_ge.back(), 5.0 - 3.0, 1e-5);
}

TEST(FrequencyShift, IncoherentPhaseFlagsAliasing) {
    Draws d(8);
    PhaseTrack track;
    PhaseSeries s;
    for (int k = 0; k < 100; ++k) {
        const auto p = three_angle_forward(0.5, 0.4, d.uniform(-kPi, kPi));
        s.t.push_back(k);
        s.p1.push_back(p[0]);
        s.p2.push_back(p[1]);
        s.p3.push_back(p[2]);
    }
    track.amplitudes.push_back(s);
    EXPECT_TRUE(track_frequency(track, 0.7).aliasing_suspected);
}

TEST(FrequencyShift, EstimatorExactOnLinearPhase) {
    Draws d(12);
    for (int trial = 0; trial < 50; ++trial) {
        const double df = d.uniform(-0.45, 0.45);
        const double phi0 = d.uniform(-3.0, 3.0);
        std::vector<double> t, phi;
        for (int k = 0; k < 100; ++k) {
            t.push_back(k);
            phi.push_back(std::remainder(-2.0 * kPi * df * k + phi0, 2.0 * kPi));
        }
        const auto est = estimate_frequency_shift(t, phi, 1.0);
        EXPECT_NEAR(est.delta_f, df, 1e-7);
        EXPECT_LT(est.residual_rms, 1e-5);
    }
}

// Flux-spectrum fit.

namespace {

struct SpectrumSamples {
    std::vector<double> phi;
    std::vector<double> f;
};

SpectrumSamples qubit_a_samples(int count, double noise, std::uint64_t seed) {
    SpectrumSamples s;
    Rng rng(seed);
    for (int k = 0; k < count; ++k) {
        const double phi = kPi + 2.0 * k / (count - 1);
        s.phi.push_back(phi);
        s.f.push_back(solve_spectrum(kQubitA.with_flux(phi), 60).omega_ge() + noise * rng.normal());
    }
    return s;
}

}  // namespace

TEST(FluxSpectrumFit, NoiselessRoundTrip) {
    const auto s = qubit_a_samples(20, 0.0, 0);
    const auto fit = fit_flux_spectrum(s.phi, s.f, CircuitParams{1.4, 0.75, 4.0, 0.0});
    EXPECT_TRUE(fit.converged);
    EXPECT_NEAR(fit.params.E_C, 1.531, 0.005 * 1.531);
    EXPECT_NEAR(fit.params.E_L, 0.685, 0.005 * 0.685);
    EXPECT_NEAR(fit.params.E_J, 4.164, 0.005 * 4.164);
}

TEST(FluxSpectrumFit, TruthStartConvergesImmediately) {
    const auto s = qubit_a_samples(20, 0.0, 0);
    const auto fit = fit_flux_spectrum(s.phi, s.f, kQubitA);
    EXPECT_TRUE(fit.converged);
    EXPECT_LT(fit.residual_rms, 1e-9);
    EXPECT_NEAR(fit.params.E_J, 4.164, 1e-6);
}

TEST(FluxSpectrumFit, OneMegahertzNoise) {
    const auto s = qubit_a_samples(20, 0.001, 77);
    const auto fit = fit_flux_spectrum(s.phi, s.f, CircuitParams{1.4, 0.75, 4.0, 0.0});
    EXPECT_NEAR(fit.params.E_C, 1.531, 0.02 * 1.531);
    EXPECT_NEAR(fit.params.E_L, 0.685, 0.02 * 0.685);
    EXPECT_NEAR(fit.params.E_J, 4.164, 0.02 * 4.164);
    EXPECT_GT(fit.uncertainties(0), 0.0);
}

TEST(FluxSpectrumFit, RejectsNarrowOrShortData) {
    const auto s = qubit_a_samples(6, 0.0, 0);
    EXPECT_THROW(fit_flux_spectrum(s.phi, s.f, kQubitA), Error);
    std::vector<double> phi, f;
    for (int k = 0; k < 10; ++k) {
        phi.push_back(kPi + 0.05 * k);
        f.push_back(solve_spectrum(kQubitA.with_flux(phi.back()), 60).omega_ge());
    }
    EXPECT_THROW(fit_flux_spectrum(phi, f, kQubitA), Error);
}

// IQ mixture.

TEST(IQFit, RecoversCentres) {
    const auto set = two_sets({0.0, 0.0}, {3.0, 0.0}, 1.0, 0.9, 0.1, 5000, 10);
    const auto fit = fit_iq_double_gaussian(set);
    EXPECT_LT(std::abs(fit.r_g - IQPoint(0.0, 0.0)), 0.05);
    EXPECT_LT(std::abs(fit.r_e - IQPoint(3.0, 0.0)), 0.05);
    EXPECT_NEAR(fit.sigma, 1.0, 0.05);
    EXPECT_FALSE(fit.degenerate);
    EXPECT_FALSE(fit.low_fidelity);
}

TEST(IQFit, RecoversSetWeights) {
    const auto set = two_sets({0.0, 0.0}, {3.0, 0.0}, 1.0, 0.9, 0.1, 5000, 20);
    const auto fit = fit_iq_double_gaussian(set);
    ASSERT_EQ(fit.set_weights.size(), 2u);
    EXPECT_NEAR(fit.set_weights[0].first, 0.9, 0.02);
    EXPECT_NEAR(fit.set_weights[1].first, 0.1, 0.02);
    EXPECT_NEAR(fit.weight_g, 0.5, 0.02);
}

TEST(IQFit, HighFidelityWeightAtLargeCount) {
    IQShotSet set;
    set.shots.push_back(synth_iq_shots({0.0, 0.0}, {3.0, 1.0}, 0.6, 0.99, 100000, NoiseSpec{30, 0.0}));
    set.shots.push_back(synth_iq_shots({0.0, 0.0}, {3.0, 1.0}, 0.6, 0.06, 100000, NoiseSpec{31, 0.0}));
    const auto fit = fit_iq_double_gaussian(set);
    EXPECT_NEAR(fit.set_weights[0].first, 0.99, 0.003);
    EXPECT_NEAR(fit.set_weights[1].first, 0.06, 0.003);
}

TEST(IQFit, GroundSetDecidesLabels) {
    // Excited-prepared shots listed second; centres swap when the first set sits at (3, 0).
    const auto set = two_sets({3.0, 0.0}, {0.0, 0.0}, 1.0, 0.9, 0.1, 5000, 40);
    const auto fit = fit_iq_double_gaussian(set);
    EXPECT_LT(std::abs(fit.r_g - IQPoint(3.0, 0.0)), 0.05);
}

TEST(IQFit, SingleClusterIsDegenerate) {
    IQShotSet set;
    set.shots.push_back(synth_iq_shots({1.0, 1.0}, {4.0, 1.0}, 1.0, 1.0, 5000, NoiseSpec{50, 0.0}));
    set.shots.push_back(synth_iq_shots({1.0, 1.0}, {4.0, 1.0}, 1.0, 1.0, 5000, NoiseSpec{51, 0.0}));
    EXPECT_TRUE(fit_iq_double_gaussian(set).degenerate);
}

TEST(IQFit, OverlappingCloudsFlagLowFidelity) {
    const auto set = two_sets({0.0, 0.0}, {0.5, 0.0}, 1.0, 0.9, 0.1, 5000, 60);
    EXPECT_TRUE(fit_iq_double_gaussian(set).low_fidelity);
}

TEST(IQFit, TooFewShotsRejected) {
    IQShotSet set;
    set.shots.push_back(synth_iq_shots({0.0, 0.0}, {3.0, 0.0}, 1.0, 0.5, 150, NoiseSpec{70, 0.0}));
    EXPECT_THROW(fit_iq_double_gaussian(set), Error);
}

// Metrology.

TEST(Metrology, ContrastExamples) {
    MetrologyInput in;
    in.r_g = {0.0, 0.0};
    in.r_e = {3.0, 4.0};
    in.rabi_contrast = 5.0;
    EXPECT_NEAR(initialization_error_metrology(in).e_i, 0.0, 1e-15);
    in.rabi_contrast = 0.9876 * 5.0;
    EXPECT_NEAR(initialization_error_metrology(in).e_i, 0.0062, 1e-12);
    in.rabi_contrast = 5.1;
    EXPECT_THROW(initialization_error_metrology(in), Error);
    in.r_e = in.r_g;
    in.rabi_contrast = 0.0;
    EXPECT_THROW(initialization_error_metrology(in), Error);
}

TEST(Metrology, ForwardModelRoundTrip) {
    const IQPoint rg(0.2, -0.1), re(2.9, 1.3);
    const double e_i = 0.01, e_down = 0.005;
    MetrologyInput in;
    in.r_g = rg;
    in.r_e = re;
    in.mean_g = (1.0 - e_i) * rg + e_i * re;
    in.mean_e = (e_i + e_down) * rg + (1.0 - e_i - e_down) * re;
    const auto res = initialization_error_metrology(in);
    EXPECT_NEAR(res.e_i, e_i, 1e-10);
    EXPECT_NEAR(res.e_down, e_down, 1e-10);
    EXPECT_TRUE(res.has_centres);
}

TEST(Metrology, ForwardModelRoundTripWithLeakage) {
    Draws d(123);
    const IQPoint rg(0.0, 0.0), re(3.0, 1.0), rf(1.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double pe = d.uniform(0.0, 0.05), pf = d.uniform(0.0, 0.05), down = d.uniform(0.0, 0.05);
        const double e_i = pe + pf;
        MetrologyInput in;
        in.r_g = rg;
        in.r_e = re;
        in.r_f = rf;
        in.mean_g = (1.0 - e_i) * rg + pe * re + pf * rf;
        in.mean_e = (pe + down) * rg + (1.0 - e_i - down) * re + pf * rf;
        const auto res = initialization_error_metrology(in);
        EXPECT_NEAR(res.p_e, pe, 1e-10);
        EXPECT_NEAR(res.p_f, pf, 1e-10);
        EXPECT_NEAR(res.e_down, down, 1e-10);
        EXPECT_NEAR(res.e_i, e_i, 1e-10);
    }
}

TEST(LeakageBound, Examples) {
    const IQPoint rg(0.0, 0.0), re(3.0, 1.0), rf(1.0, 3.0);
    EXPECT_NEAR(leakage_removal_bound(rg, re, rg, re, 0.0), 1.0, 1e-15);
    const double pf = 0.036;
    const IQPoint mg = (1.0 - pf) * rg + pf * rf;
    const IQPoint me = (1.0 - pf) * re + pf * rf;
    EXPECT_NEAR(leakage_removal_bound(mg, me, rg, re, 0.0), 0.964, 1e-12);
    EXPECT_THROW(leakage_removal_bound(mg, me, rg, rg, 0.0), Error);
}

TEST(LeakageBound, NeverExceedsTrueEfficiency) {
    Draws d(321);
    const IQPoint rg(0.0, 0.0), re(3.0, 1.0), rf(1.0, 3.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double pe = d.uniform(0.0, 0.05), pf = d.uniform(0.0, 0.1), down = d.uniform(0.0, 0.05);
        const double e_i = pe + pf;
        const IQPoint mg = (1.0 - e_i) * rg + pe * re + pf * rf;
        const IQPoint me = (pe + down) * rg + (1.0 - e_i - down) * re + pf * rf;
        EXPECT_LE(leakage_removal_bound(mg, me, rg, re, down), 1.0 - pf + 1e-12);
    }
}
