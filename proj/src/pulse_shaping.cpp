#include "fluxinit/pulse_shaping.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "fluxinit/errors.hpp"

namespace fluxinit {

void RampSpec::validate() const {
    std::vector<std::string> problems;
    if (lambdas.empty()) problems.emplace_back("lambdas must be non-empty");
    for (double l : lambdas) {
        if (!std::isfinite(l)) {
            problems.emplace_back("lambdas must be finite");
            break;
        }
    }
    if (!std::isfinite(theta_f)) problems.emplace_back("theta_f must be finite");
    if (!(T > 0.0) || !std::isfinite(T)) problems.push_back(fmt::format("T must be > 0 (got {})", T));
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        problems.push_back(fmt::format("dt must be > 0 (got {})", dt));
    } else if (T > 0.0 && std::isfinite(T)) {
        const double steps = T / dt;
        if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
            problems.push_back(fmt::format("dt={} does not divide T={}", dt, T));
        }
    }
    if (!problems.empty()) throw ValidationError(std::move(problems));
}

namespace {

double series(const RampSpec& spec, double t) {
    const double T = spec.T;
    double acc = 0.0;
    for (std::size_t k = 0; k < spec.lambdas.size(); ++k) {
        const double n = static_cast<double>(k + 1);
        acc += spec.lambdas[k] *
               (t - T / (4.0 * n * std::numbers::pi) * std::sin(4.0 * n * std::numbers::pi * t / T));
    }
    return 2.0 * spec.theta_f / T * acc;
}

int drive_steps(const RampSpec& spec) { return static_cast<int>(std::lround(spec.T / spec.dt)); }

}  // namespace

double theta_p(const RampSpec& spec, double t) {
    if (!(t >= 0.0 && t <= spec.T)) {
        throw Error(ErrorKind::ParameterDomain,
                    fmt::format("theta_p: t={} ns outside [0, {}]", t, spec.T));
    }
    return series(spec, std::min(t, 0.5 * spec.T));
}

double theta_p_plateau(const RampSpec& spec) {
    return spec.theta_f * std::accumulate(spec.lambdas.begin(), spec.lambdas.end(), 0.0);
}

namespace {

void check_plateau(const RampSpec& spec) {
    const double top = theta_p_plateau(spec);
    if (!(top < 0.5 * std::numbers::pi)) {
        throw Error(ErrorKind::ParameterDomain,
                    fmt::format("envelope diverges: theta_p(T/2)={} >= pi/2", top));
    }
}

}  // namespace

double omega0_for_plateau(const RampSpec& spec, double plateau) {
    check_plateau(spec);
    const double t = std::tan(theta_p_plateau(spec));
    if (!(t > 0.0)) {
        throw Error(ErrorKind::ParameterDomain, "plateau mixing angle must be positive");
    }
    return plateau / t;
}

double drive_value(const RampSpec& spec, double Omega_0, double t) {
    if (t < 0.0) return 0.0;
    return Omega_0 * std::tan(theta_p(spec, std::min(t, spec.T)));
}

SampledEnvelope drive_envelope(const RampSpec& spec, double Omega_0) {
    spec.validate();
    check_plateau(spec);
    SampledEnvelope env;
    const int n = drive_steps(spec);
    env.times.reserve(n + 1);
    env.values.reserve(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double t = (k == n) ? spec.T : k * spec.dt;
        env.times.push_back(t);
        env.values.push_back(Omega_0 * std::tan(theta_p(spec, t)));
    }
    return env;
}

double ControlSchedule::omega_ef(double t) const { return drive_value(spec, Omega_0, t); }

double ControlSchedule::plateau() const { return Omega_0 * std::tan(theta_p_plateau(spec)); }

ControlSchedule make_schedule(const RampSpec& spec, double T_pre, double flux_offset,
                              double omega_p, double Omega_0) {
    spec.validate();
    check_plateau(spec);
    if (!(T_pre >= 0.0) || !std::isfinite(T_pre)) {
        throw Error(ErrorKind::ParameterDomain, fmt::format("T_pre must be >= 0 (got {})", T_pre));
    }
    ControlSchedule s;
    s.spec = spec;
    s.Omega_0 = Omega_0;
    s.T_pre = T_pre;
    s.flux_amplitude = flux_offset;
    s.omega_p = omega_p;

    const int pre = static_cast<int>(std::ceil(T_pre / spec.dt - 1e-9));
    const int n = drive_steps(spec);
    s.times.reserve(pre + n + 1);
    for (int j = pre; j >= 1; --j) s.times.push_back(j == pre ? -T_pre : -j * spec.dt);
    for (int k = 0; k <= n; ++k) s.times.push_back(k == n ? spec.T : k * spec.dt);

    s.drive_envelope.reserve(s.times.size());
    s.theta_p.reserve(s.times.size());
    s.flux_offset.assign(s.times.size(), flux_offset);
    for (double t : s.times) {
        const double th = t < 0.0 ? 0.0 : theta_p(spec, t);
        s.theta_p.push_back(th);
        s.drive_envelope.push_back(t < 0.0 ? 0.0 : std::tan(th));
    }
    return s;
}

}  // namespace fluxinit
