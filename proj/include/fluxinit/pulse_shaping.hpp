#pragma once

#include <numbers>
#include <vector>

namespace fluxinit {

/// Ramp coefficients of the cosine-series mixing-angle schedule used in the experiment.
inline const std::vector<double> kDefaultLambdas = {1.028, -0.0606, 0.0052, 0.0055,
                                                  0.0047, 0.0046, 0.0035};

struct RampSpec {
    std::vector<double> lambdas = kDefaultLambdas;
    double theta_f = std::numbers::pi / 4.0;
    double T = 500.0;   // total drive duration, ns
    double dt = 0.1;    // sample step, ns

    /// Throws ValidationError listing every violated invariant.
    void validate() const;
};

/// theta_p(t) = (2 theta_f / T) sum_n lambda_n (t - T/(4 n pi) sin(4 n pi t / T)) for t <= T/2,
/// held at its T/2 value on (T/2, T]. Throws for t outside [0, T].
double theta_p(const RampSpec& spec, double t);

/// theta_p(T/2) = theta_f * sum(lambdas).
double theta_p_plateau(const RampSpec& spec);

/// Omega_0 giving the requested plateau drive strength Omega_0 tan(theta_p(T/2)).
double omega0_for_plateau(const RampSpec& spec, double plateau);

/// Omega_0 tan(theta_p(t)) for t in [0, T], zero for t < 0.
double drive_value(const RampSpec& spec, double Omega_0, double t);

struct SampledEnvelope {
    std::vector<double> times;
    std::vector<double> values;  // Omega_ef(t), GHz
};

/// Samples Omega_ef on [0, T] at spec.dt. Throws ErrorKind::ParameterDomain when
/// theta_p(T/2) >= pi/2 (the envelope diverges).
SampledEnvelope drive_envelope(const RampSpec& spec, double Omega_0);

/// Flux pulse plus microwave drive on a common grid over [-T_pre, T].
///
/// The drive grid is t = k dt for k = 0..T/dt. The pre-drive segment is laid
/// out backwards from 0 in steps of dt, with its first point clamped to -T_pre.
struct ControlSchedule {
    RampSpec spec;
    double Omega_0 = 0.0;
    double T_pre = 0.0;
    double flux_amplitude = 0.0;  // delta phi_ext during the pulse, rad
    double omega_p = 0.0;         // GHz

    std::vector<double> times;
    std::vector<double> drive_envelope;  // V_d / V_0 = tan(theta_p), 0 before the drive
    std::vector<double> theta_p;
    std::vector<double> flux_offset;

    /// Omega_ef(t) in GHz, evaluated from the series rather than the samples.
    double omega_ef(double t) const;
    double plateau() const;
    double start() const { return -T_pre; }
    double end() const { return spec.T; }
};

ControlSchedule make_schedule(const RampSpec& spec, double T_pre, double flux_offset,
                              double omega_p, double Omega_0);

}  // namespace fluxinit
