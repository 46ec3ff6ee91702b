#include "fluxinit/dynamics.hpp"

#include <cmath>
#include <complex>

#include <fmt/format.h>

#include "fluxinit/errors.hpp"
#include "fluxinit/units.hpp"

namespace fluxinit {

using namespace std::complex_literals;

const std::vector<double>& Trajectory::series(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return populations[i];
    }
    throw Error(ErrorKind::IndexOutOfRange, fmt::format("trajectory has no state '{}'", label));
}

namespace {

void check_initial(const Vector3c& initial) {
    const double norm = initial.squaredNorm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-9) {
        throw Error(ErrorKind::ParameterDomain,
                    fmt::format("initial state must be normalized (|psi|^2 = {})", norm));
    }
}

Trajectory start_trajectory(const ControlSchedule& schedule, TripleKind kind) {
    Trajectory tr;
    const auto triple = subspace_triple(kind);
    tr.labels.assign(triple.labels.begin(), triple.labels.end());
    tr.times = schedule.times;
    tr.populations.assign(3, {});
    for (auto& p : tr.populations) p.reserve(schedule.times.size());
    tr.p_ground.reserve(schedule.times.size());
    return tr;
}

void record(Trajectory& tr, const Vector3c& psi, double t) {
    if (!psi.allFinite()) {
        throw Error(ErrorKind::Numerical,
                    fmt::format("state became non-finite at t={} ns (integration blow-up)", t));
    }
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double pi = std::norm(psi(i));
        tr.populations[i].push_back(pi);
        sum += pi;
    }
    tr.p_ground.push_back(1.0 - sum);
}

template <typename Generator>
Vector3c rk4_step(const Generator& h, double t, double dt, const Vector3c& psi) {
    const Vector3c k1 = -1i * (h(t) * psi);
    const Vector3c k2 = -1i * (h(t + 0.5 * dt) * (psi + 0.5 * dt * k1));
    const Vector3c k3 = -1i * (h(t + 0.5 * dt) * (psi + 0.5 * dt * k2));
    const Vector3c k4 = -1i * (h(t + dt) * (psi + dt * k3));
    return psi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <typename Generator>
Trajectory integrate(const Generator& h, const ControlSchedule& schedule, const Vector3c& initial,
                     double max_dt, TripleKind kind) {
    check_initial(initial);
    Trajectory tr = start_trajectory(schedule, kind);
    Vector3c psi = initial;
    const auto& times = schedule.times;
    record(tr, psi, times.front());
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double span = times[k] - times[k - 1];
        const int sub = max_dt > 0.0 ? std::max(1, static_cast<int>(std::ceil(span / max_dt - 1e-9)))
                                     : 1;
        const double dt = span / sub;
        for (int s = 0; s < sub; ++s) psi = rk4_step(h, times[k - 1] + s * dt, dt, psi);
        record(tr, psi, times[k]);
    }
    return tr;
}

}  // namespace

Trajectory evolve_reduced(const ReducedParams& p, const ControlSchedule& schedule,
                          const Vector3c& initial, TripleKind kind) {
    p.validate();
    ReducedParams q = p;
    q.Omega_ef = 0.0;
    // Interaction picture of the real diagonal (detuning), so that part is exact;
    // populations are unchanged by the diagonal phase.
    Matrix3c base = rotating_frame_hamiltonian(q);
    const Eigen::Vector3d detuning = base.diagonal().real();
    for (int i = 0; i < 3; ++i) base(i, i) = std::complex<double>(0.0, base(i, i).imag());
    auto h = [&](double t) {
        Matrix3c m = base;
        m(0, 1) = m(1, 0) = 0.5 * angular(schedule.omega_ef(t));
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (i != j && detuning(i) != detuning(j)) {
                    m(i, j) *= std::exp(1i * ((detuning(i) - detuning(j)) * t));
                }
            }
        }
        return m;
    };
    return integrate(h, schedule, initial, 0.0, kind);
}

Trajectory evolve_reduced_lab(const ReducedParams& p, const ControlSchedule& schedule,
                              const Vector3c& initial, double dt, TripleKind kind) {
    p.validate();
    if (!(dt > 0.0)) throw Error(ErrorKind::ParameterDomain, "lab-frame dt must be > 0");
    // Interaction picture with respect to diag(a, b, c); energies measured from a.
    const double wab = angular(p.lab.b - p.lab.a);
    const double wac = angular(p.lab.c - p.lab.a);
    const double wbc = wac - wab;
    const double wp = angular(p.omega_p);
    auto h = [&](double t) {
        Matrix3c m = Matrix3c::Zero();
        const double drive = angular(schedule.omega_ef(t)) * std::cos(wp * t);
        const std::complex<double> ab = drive * std::exp(-1i * (wab * t));
        const std::complex<double> ac = 0.5 * angular(p.g_re) * std::exp(-1i * (wac * t));
        const std::complex<double> bc = 0.5 * angular(p.g_rf) * std::exp(-1i * (wbc * t));
        m(0, 1) = ab;
        m(1, 0) = std::conj(ab);
        m(0, 2) = ac;
        m(2, 0) = std::conj(ac);
        m(1, 2) = bc;
        m(2, 1) = std::conj(bc);
        m(2, 2) = -0.5i * p.Gamma;
        return m;
    };
    return integrate(h, schedule, initial, dt, kind);
}

ErrorMap initialization_error_map(const ReducedParams& p, std::span<const double> omegas,
                                  std::span<const double> durations, const MapSettings& settings) {
    std::vector<std::string> problems;
    if (omegas.empty()) problems.emplace_back("error map: omega grid is empty");
    if (durations.empty()) problems.emplace_back("error map: duration grid is empty");
    for (double w : omegas) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            problems.push_back(fmt::format("error map: omega {} must be finite and >= 0", w));
        }
    }
    for (double T : durations) {
        if (!(T > 0.0) || !std::isfinite(T)) {
            problems.push_back(fmt::format("error map: duration {} must be finite and > 0", T));
        }
    }
    if (!problems.empty()) throw ValidationError(std::move(problems));

    ErrorMap map;
    map.omegas.assign(omegas.begin(), omegas.end());
    map.durations.assign(durations.begin(), durations.end());
    const std::size_t rows = omegas.size();
    const std::size_t cols = durations.size();
    map.errors.assign(rows, std::vector<double>(cols, 0.0));
    map.leakage.assign(rows, std::vector<double>(cols, 0.0));

    parallel_for(rows * cols, settings.jobs, [&](std::size_t cell) {
        const std::size_t i = cell / cols;
        const std::size_t j = cell % cols;
        try {
            RampSpec ramp = settings.ramp;
            ramp.T = durations[j];
            const double omega0 = omega0_for_plateau(ramp, omegas[i]);
            const auto schedule = make_schedule(ramp, settings.T_pre, 0.0, p.omega_p, omega0);
            const auto tr = evolve_reduced(p, schedule, Vector3c(1.0, 0.0, 0.0));
            map.errors[i][j] = tr.final_excited();
            map.leakage[i][j] = tr.populations[1].back();
        } catch (const Error& e) {
            throw Error(e.kind(), fmt::format("error map cell ({}, {}) [Omega={} GHz, T={} ns]: {}",
                                              i, j, omegas[i], durations[j], e.what()));
        }
    });
    return map;
}

DecayTimeFit extract_decay_time(std::span<const double> durations, std::span<const double> errors,
                                double min_duration) {
    if (durations.size() != errors.size()) {
        throw Error(ErrorKind::ParameterDomain, "extract_decay_time: size mismatch");
    }
    std::vector<double> x, y;
    for (std::size_t k = 0; k < durations.size(); ++k) {
        if (durations[k] < min_duration) continue;
        if (!(errors[k] > 0.0)) {
            throw Error(ErrorKind::ParameterDomain,
                        fmt::format("extract_decay_time: error {} at T={} is not positive",
                                    errors[k], durations[k]));
        }
        x.push_back(durations[k]);
        y.push_back(std::log(errors[k]));
    }
    if (x.size() < 4) {
        throw Error(ErrorKind::ParameterDomain,
                    fmt::format("extract_decay_time needs >= 4 samples with T >= {} (got {})",
                                min_duration, x.size()));
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    if (!(sxx > 0.0)) throw Error(ErrorKind::DegenerateInput, "extract_decay_time: durations identical");
    const double slope = sxy / sxx;
    if (!(slope < 0.0)) {
        throw Error(ErrorKind::FitFailure,
                    fmt::format("extract_decay_time: errors do not decay (slope {})", slope));
    }
    DecayTimeFit fit;
    fit.tau = -1.0 / slope;
    fit.amplitude = std::exp(my - slope * mx);
    fit.samples_used = x.size();
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double model = std::exp(my + slope * (x[k] - mx));
        const double observed = std::exp(y[k]);
        fit.max_relative_residual =
            std::max(fit.max_relative_residual, std::abs(model - observed) / observed);
    }
    fit.poor_fit = fit.max_relative_residual > 0.2;
    return fit;
}

LeakageRemovalCurve leakage_removal_efficiency(const ReducedParams& p, const RampSpec& ramp,
                                               double plateau, std::span<const double> t_pre,
                                               int jobs) {
    if (t_pre.empty()) throw ValidationError({"leakage removal: T_pre grid is empty"});
    const double omega0 = omega0_for_plateau(ramp, plateau);
    LeakageRemovalCurve c;
    c.t_pre.assign(t_pre.begin(), t_pre.end());
    const std::size_t n = t_pre.size();
    c.efficiency.resize(n);
    c.excited.resize(n);
    c.p_a.resize(n);
    c.p_b.resize(n);
    c.p_c.resize(n);
    parallel_for(n, jobs, [&](std::size_t k) {
        const auto schedule = make_schedule(ramp, t_pre[k], 0.0, p.omega_p, omega0);
        const auto tr = evolve_reduced(p, schedule, Vector3c(0.0, 1.0, 0.0));
        c.p_a[k] = tr.populations[0].back();
        c.p_b[k] = tr.populations[1].back();
        c.p_c[k] = tr.populations[2].back();
        c.efficiency[k] = 1.0 - c.p_b[k];
        c.excited[k] = tr.final_excited();
    });
    return c;
}

double oscillation_period(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorKind::ParameterDomain, "oscillation_period: size mismatch");
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
        // Vertex of the parabola through the three samples.
        const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
        const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
        const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
        const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
        peaks.push_back(den != 0.0 ? x1 - 0.5 * num / den : x1);
    }
    if (peaks.size() < 2) return 0.0;
    return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

double steady_state_error(double n_th, double T1_us, double Gamma_init) {
    if (!(n_th >= 0.0) || !(T1_us > 0.0) || !(Gamma_init >= 0.0)) {
        throw Error(ErrorKind::ParameterDomain,
                    fmt::format("steady_state_error: need n_th >= 0, T1 > 0, Gamma_init >= 0 "
                                "(got {}, {}, {})",
                                n_th, T1_us, Gamma_init));
    }
    const double gamma_up = n_th / (1000.0 * T1_us);
    if (gamma_up == 0.0 && Gamma_init == 0.0) {
        throw Error(ErrorKind::DegenerateInput, "steady_state_error: both rates are zero");
    }
    return gamma_up / (gamma_up + Gamma_init);
}

}  // namespace fluxinit
