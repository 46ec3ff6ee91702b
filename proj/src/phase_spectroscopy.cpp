#include "fluxinit/phase_spectroscopy.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "fluxinit/errors.hpp"
#include "fluxinit/units.hpp"

namespace fluxinit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kThird = 2.0 * std::numbers::pi / 3.0;

double wrap_pi(double x) {
    double y = std::remainder(x, kTwoPi);  // [-pi, pi]
    if (y <= -kPi) y += kTwoPi;
    return y;
}

double wrap_half(double x, double period) {
    double y = std::remainder(x, period);
    if (y <= -0.5 * period) y += period;
    return y;
}

}  // namespace

std::array<double, 3> three_angle_forward(double a0, double a1, double phi) {
    return {a0 - a1 * std::cos(phi), a0 - a1 * std::cos(phi - kThird),
            a0 - a1 * std::cos(phi + kThird)};
}

ThreeAngleSolution solve_three_angle(double P1, double P2, double P3) {
    ThreeAngleSolution s;
    s.a0 = (P1 + P2 + P3) / 3.0;
    const double d1 = P1 - s.a0, d2 = P2 - s.a0, d3 = P3 - s.a0;
    s.a1 = std::sqrt(2.0 / 3.0 * (d1 * d1 + d2 * d2 + d3 * d3));
    if (!(s.a1 >= 1e-12)) {
        throw Error(ErrorKind::DegenerateInput,
                    fmt::format("indeterminate phase: contrast a1={} below 1e-12", s.a1));
    }
    // cos = (a0 - P1)/a1, sin = (P3 - P2)/(sqrt 3 a1); atan2 needs no normalization.
    s.phi = std::atan2((P3 - P2) / std::sqrt(3.0), s.a0 - P1);
    if (s.phi <= -kPi) s.phi += kTwoPi;
    return s;
}

void PhaseTrack::validate() const {
    std::vector<std::string> problems;
    if (!(dt > 0.0)) problems.push_back(fmt::format("phase track: dt must be > 0 (got {})", dt));
    if (amplitudes.empty()) problems.emplace_back("phase track: no amplitudes");
    for (std::size_t i = 0; i < amplitudes.size(); ++i) {
        const auto& a = amplitudes[i];
        const auto n = a.t.size();
        if (a.p1.size() != n || a.p2.size() != n || a.p3.size() != n) {
            problems.push_back(fmt::format("phase track amplitude {}: unequal series lengths", i));
        }
        if (n < 2) problems.push_back(fmt::format("phase track amplitude {}: fewer than 2 samples", i));
        for (const auto* s : {&a.p1, &a.p2, &a.p3}) {
            for (double p : *s) {
                if (!(p >= 0.0 && p <= 1.0)) {
                    problems.push_back(
                        fmt::format("phase track amplitude {}: population {} outside [0, 1]", i, p));
                    break;
                }
            }
        }
    }
    if (!problems.empty()) throw ValidationError(std::move(problems));
}

namespace {

struct Objective {
    const std::vector<double>& t;
    const std::vector<double>& phi;

    // Returns the objective and sets phi0 to the circular mean of phi + 2 pi df t.
    double operator()(double df, double& phi0) const {
        std::complex<double> acc = 0.0;
        for (std::size_t k = 0; k < t.size(); ++k) acc += std::polar(1.0, phi[k] + kTwoPi * df * t[k]);
        phi0 = std::arg(acc);
        double sum = 0.0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            const double r = wrap_pi(phi[k] + kTwoPi * df * t[k] - phi0);
            sum += r * r;
        }
        return sum;
    }
};

}  // namespace

AmplitudeEstimate estimate_frequency_shift(const std::vector<double>& t,
                                           const std::vector<double>& phi_sq, double fs) {
    if (t.size() != phi_sq.size() || t.size() < 2) {
        throw Error(ErrorKind::ParameterDomain, "estimate_frequency_shift: need >= 2 matched samples");
    }
    const Objective obj{t, phi_sq};
    constexpr int kGrid = 1000;
    const double step = fs / kGrid;
    std::vector<double> values(kGrid);
    double phi0 = 0.0;
    // Grid points df = -fs/2 + (k+1) step, k = 0..999, covering (-fs/2, fs/2].
    for (int k = 0; k < kGrid; ++k) values[k] = obj(-0.5 * fs + (k + 1) * step, phi0);
    int best = 0;
    for (int k = 1; k < kGrid; ++k) {
        if (values[k] < values[best]) best = k;
    }

    // Golden-section on [best - step, best + step].
    const double center = -0.5 * fs + (best + 1) * step;
    double a = center - step, b = center + step;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = obj(c, phi0), fd = obj(d, phi0);
    for (int it = 0; it < 200 && (b - a) > 1e-12 * std::max(1.0, fs); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = obj(c, phi0);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = obj(d, phi0);
        }
    }
    AmplitudeEstimate est;
    est.delta_f = 0.5 * (a + b);
    est.objective = obj(est.delta_f, est.phi0);
    if (values[best] < est.objective) {
        est.delta_f = center;
        est.objective = obj(center, est.phi0);
    }
    est.delta_f = wrap_half(est.delta_f, fs);
    est.residual_rms = std::sqrt(est.objective / static_cast<double>(t.size()));

    // Competing local minima on the periodic grid, away from the winner.
    for (int k = 0; k < kGrid; ++k) {
        const double left = values[(k + kGrid - 1) % kGrid];
        const double right = values[(k + 1) % kGrid];
        if (!(values[k] <= left && values[k] <= right)) continue;
        const int dist = std::min(std::abs(k - best), kGrid - std::abs(k - best));
        if (dist <= 2) continue;
        if (values[k] <= 1.01 * est.objective + 1e-300) est.ambiguous = true;
    }
    return est;
}

FrequencyTrack track_frequency(const PhaseTrack& track, double f_ge_at_zero, double residual_limit) {
    track.validate();
    const double fs = track.sampling_rate();
    FrequencyTrack out;
    double previous = 0.0;
    double f = f_ge_at_zero;
    for (const auto& amp : track.amplitudes) {
        std::vector<double> phi(amp.t.size());
        for (std::size_t k = 0; k < amp.t.size(); ++k) {
            phi[k] = solve_three_angle(amp.p1[k], amp.p2[k], amp.p3[k]).phi;
        }
        const auto est = estimate_frequency_shift(amp.t, phi, fs);
        const double step = wrap_half(est.delta_f - previous, fs);
        previous = est.delta_f;
        f += step;
        out.steps.push_back(step);
        out.f_ge.push_back(f);
        out.ambiguous = out.ambiguous || est.ambiguous;
        out.aliasing_suspected = out.aliasing_suspected || est.residual_rms > residual_limit;
        out.estimates.push_back(est);
    }
    return out;
}

}  // namespace fluxinit
