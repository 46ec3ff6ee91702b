#pragma once

#include <array>
#include <vector>

namespace fluxinit {

struct ThreeAngleSolution {
    double a0 = 0.0;
    double a1 = 0.0;
    double phi = 0.0;  // (-pi, pi]
};

/// P_k = a0 - a1 cos(phi + theta_k) for projection phases theta = (0, -2pi/3, +2pi/3).
std::array<double, 3> three_angle_forward(double a0, double a1, double phi);

/// Closed-form inversion of three_angle_forward. Throws ErrorKind::DegenerateInput
/// when a1 < 1e-12 (the phase is indeterminate).
ThreeAngleSolution solve_three_angle(double P1, double P2, double P3);

/// Ramsey-type populations for one flux amplitude.
struct PhaseSeries {
    std::vector<double> t;  // ns
    std::vector<double> p1;
    std::vector<double> p2;
    std::vector<double> p3;
};

struct PhaseTrack {
    double dt = 1.0;  // ns; f_s = 1/dt
    std::vector<PhaseSeries> amplitudes;

    double sampling_rate() const { return 1.0 / dt; }
    void validate() const;
};

struct AmplitudeEstimate {
    double delta_f = 0.0;  // f_ge(V_i) - f_ge(0) on the principal branch, GHz
    double phi0 = 0.0;
    double objective = 0.0;     // sum of squared wrapped residuals, rad^2
    double residual_rms = 0.0;  // rad
    bool ambiguous = false;     // a second minimum within 1% of the best
};

/// Minimizes sum_t wrap(phi_sq(t) + 2 pi df t - phi0)^2, residuals wrapped to (-pi, pi],
/// phi0 set to the circular mean for each df. Grid over (-f_s/2, f_s/2] at f_s/1000
/// then golden-section refinement.
AmplitudeEstimate estimate_frequency_shift(const std::vector<double>& t,
                                           const std::vector<double>& phi_sq, double fs);

struct FrequencyTrack {
    std::vector<double> f_ge;   // GHz per amplitude
    std::vector<double> steps;  // f_ge(V_i) - f_ge(V_{i-1}), first relative to f_ge(0)
    std::vector<AmplitudeEstimate> estimates;
    bool ambiguous = false;
    bool aliasing_suspected = false;  // some residual rms > residual_limit
};

/// Per-amplitude estimate, neighbour steps wrapped to (-f_s/2, f_s/2], cumulative sum
/// anchored at f_ge_at_zero.
FrequencyTrack track_frequency(const PhaseTrack& track, double f_ge_at_zero,
                               double residual_limit = 0.5);

}  // namespace fluxinit
