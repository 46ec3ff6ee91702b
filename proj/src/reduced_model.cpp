#include "fluxinit/reduced_model.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include <fmt/format.h>

#include "fluxinit/errors.hpp"
#include "fluxinit/units.hpp"

namespace fluxinit {

using namespace std::complex_literals;

SubspaceTriple subspace_triple(TripleKind kind) {
    SubspaceTriple t;
    t.kind = kind;
    if (kind == TripleKind::Red) {
        t.labels = {"e0", "f0", "g1"};
        t.drive_levels = {1, 2};
        t.coupling_levels = {0, 2};
        t.qubit_level = {1, 2, 0};
        t.photons = {0, 0, 1};
    } else {
        t.labels = {"g0", "h0", "e1"};
        t.drive_levels = {0, 3};
        t.coupling_levels = {1, 3};
        t.qubit_level = {0, 3, 1};
        t.photons = {0, 0, 1};
    }
    return t;
}

void ReducedParams::validate() const {
    std::vector<std::string> problems;
    if (!(Gamma >= 0.0)) problems.push_back(fmt::format("Gamma must be >= 0 (got {})", Gamma));
    if (!(g_rf >= 0.0)) problems.push_back(fmt::format("g_rf must be >= 0 (got {})", g_rf));
    if (!(Omega_ef >= 0.0)) {
        problems.push_back(fmt::format("Omega_ef must be >= 0 (got {})", Omega_ef));
    }
    if (!std::isfinite(Delta)) problems.push_back("Delta must be finite");
    if (!problems.empty()) throw ValidationError(problems);
}

ReducedParams reduced_params_from_spectrum(const EigenSolution& sol, TripleKind kind,
                                           double omega_r, double g_coupled, double Gamma,
                                           double Omega_ef) {
    ReducedParams p;
    p.Omega_ef = Omega_ef;
    p.g_rf = g_coupled;
    p.Gamma = Gamma;
    if (kind == TripleKind::Red) {
        p.lab = {sol.omega_ge(), sol.omega_gf(), omega_r};
        p.omega_s = omega_r - sol.omega_ge();
        p.Delta = sol.omega_gf() - omega_r;
    } else {
        p.lab = {0.0, sol.omega_gh(), sol.omega_ge() + omega_r};
        p.omega_s = omega_r + sol.omega_ge();
        p.Delta = sol.omega_gh() - (omega_r + sol.omega_ge());
    }
    p.omega_p = p.omega_s;
    return p;
}

Matrix3c lab_frame_hamiltonian(const ReducedParams& p, double t, double drive_value) {
    const double drive = angular(drive_value) * std::cos(angular(p.omega_p) * t);
    Matrix3c h = Matrix3c::Zero();
    h(0, 0) = angular(p.lab.a);
    h(1, 1) = angular(p.lab.b);
    h(2, 2) = angular(p.lab.c) - 0.5i * p.Gamma;
    h(0, 1) = h(1, 0) = drive;
    h(0, 2) = h(2, 0) = 0.5 * angular(p.g_re);
    h(1, 2) = h(2, 1) = 0.5 * angular(p.g_rf);
    return h;
}

Matrix3c rotating_frame_hamiltonian(const ReducedParams& p) {
    Matrix3c h = Matrix3c::Zero();
    h(0, 1) = h(1, 0) = 0.5 * angular(p.Omega_ef);
    h(1, 1) = angular(p.Delta);
    h(1, 2) = h(2, 1) = 0.5 * angular(p.g_rf);
    h(2, 2) = -0.5i * p.Gamma;
    return h;
}

Matrix3c rotating_frame_hamiltonian_detuned(const ReducedParams& p) {
    Matrix3c h = Matrix3c::Zero();
    h(0, 1) = h(1, 0) = 0.5 * angular(p.Omega_ef);
    h(1, 1) = angular(p.lab.b - p.lab.a - p.omega_p);
    h(1, 2) = h(2, 1) = 0.5 * angular(p.g_rf);
    h(2, 2) = angular(p.lab.c - p.lab.a - p.omega_p) - 0.5i * p.Gamma;
    return h;
}

DressedState dressed_g1_and_rate(const ReducedParams& p, double matrix_element,
                                 double g_r_scale) {
    const double g = g_r_scale * matrix_element;
    if (p.Delta == 0.0 || std::abs(p.Delta) < 3.0 * g) {
        throw Error(ErrorKind::DispersiveRegime,
                    fmt::format("dispersive approximation needs |Delta| >= 3 g_rf "
                                "(Delta={} GHz, g_rf={} GHz)",
                                p.Delta, g));
    }
    DressedState d;
    d.vector = Eigen::Vector3d(0.0, g / (2.0 * p.Delta), 1.0);
    d.rate = std::abs(p.Omega_ef * g / (2.0 * p.Delta));
    return d;
}

Eigen::Matrix3d adiabatic_rotation(double theta, double phi) {
    const double st = std::sin(theta), ct = std::cos(theta);
    const double sp = std::sin(phi), cp = std::cos(phi);
    Eigen::Matrix3d r;
    r << st * sp, ct, st * cp,
         cp, 0.0, -sp,
         ct * sp, -st, ct * cp;
    return r;
}

StirapEigensystem stirap_eigensystem(double Omega_ef, double g_rf, double Delta) {
    if (Omega_ef == 0.0 && g_rf == 0.0) {
        throw Error(ErrorKind::DegenerateInput,
                    "mixing angles undefined when both Omega_ef and g_rf vanish");
    }
    StirapEigensystem s;
    const double omega_sq = Omega_ef * Omega_ef + g_rf * g_rf;
    const double root = std::sqrt(Delta * Delta + omega_sq);
    s.angles.theta = std::atan2(Omega_ef, g_rf);
    s.angles.phi = std::atan2(std::sqrt(omega_sq), root + Delta);
    const Eigen::Matrix3d r = adiabatic_rotation(s.angles.theta, s.angles.phi);
    s.psi_plus = r.col(0);
    s.psi_zero = r.col(1);
    s.psi_minus = r.col(2);
    s.energies = {0.5 * (Delta + root), 0.0, 0.5 * (Delta - root)};
    return s;
}

Matrix3c adiabatic_frame_hamiltonian(double theta, double theta_dot, double Omega_ef,
                                     double g_rf, double Gamma) {
    const double omega = angular(std::hypot(Omega_ef, g_rf));
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    const std::complex<double> coupling = 1i * theta_dot * inv_sqrt2;

    Matrix3c h = Matrix3c::Zero();
    h(0, 0) = 0.5 * omega;
    h(2, 2) = -0.5 * omega;
    h(0, 1) = coupling;
    h(1, 0) = -coupling;
    h(1, 2) = -coupling;
    h(2, 1) = coupling;

    const double c2 = std::cos(theta) * std::cos(theta);
    const double s2 = std::sin(theta) * std::sin(theta);
    const std::complex<double> bright = -0.25i * Gamma * c2;
    const std::complex<double> leak = 1i * Gamma * std::sin(2.0 * theta) / (4.0 * std::numbers::sqrt2);
    h(0, 0) += bright;
    h(0, 2) += bright;
    h(2, 0) += bright;
    h(2, 2) += bright;
    h(0, 1) += leak;
    h(1, 0) += leak;
    h(1, 2) += leak;
    h(2, 1) += leak;
    h(1, 1) += -0.5i * Gamma * s2;
    return h;
}

std::vector<double> gradient(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (y.size() != n) throw Error(ErrorKind::ParameterDomain, "gradient: size mismatch");
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    if (n == 2) {
        d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
        return d;
    }
    // Stencils written on differences so a constant input gives exactly zero.
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h1 = x[i] - x[i - 1];
        const double h2 = x[i + 1] - x[i];
        d[i] = (h1 * h1 * (y[i + 1] - y[i]) + h2 * h2 * (y[i] - y[i - 1])) / (h1 * h2 * (h1 + h2));
    }
    {
        const double h1 = x[1] - x[0], h2 = x[2] - x[1];
        d[0] = (2.0 * h1 + h2) / (h1 * (h1 + h2)) * (y[1] - y[0]) -
               h1 / (h2 * (h1 + h2)) * (y[2] - y[1]);
    }
    {
        const double h1 = x[n - 2] - x[n - 3], h2 = x[n - 1] - x[n - 2];
        d[n - 1] = (2.0 * h2 + h1) / (h2 * (h1 + h2)) * (y[n - 1] - y[n - 2]) -
                   h2 / (h1 * (h1 + h2)) * (y[n - 2] - y[n - 3]);
    }
    return d;
}

LeakagePair nonadiabatic_leakage(std::span<const double> times, std::span<const double> theta,
                                 std::span<const double> omega_total) {
    const std::size_t n = times.size();
    if (theta.size() != n || omega_total.size() != n) {
        throw Error(ErrorKind::ParameterDomain, "nonadiabatic_leakage: schedule size mismatch");
    }
    if (n < 2) return {};
    const std::vector<double> theta_dot = gradient(times, theta);

    // Accumulated dynamical phase int Omega/2 dt (trapezoid), then the oscillatory integrals.
    double phase = 0.0;
    std::complex<double> sum_plus = 0.0, sum_minus = 0.0;
    std::complex<double> prev_plus = theta_dot[0], prev_minus = theta_dot[0];
    for (std::size_t k = 1; k < n; ++k) {
        const double dt = times[k] - times[k - 1];
        phase += 0.25 * dt * (angular(omega_total[k]) + angular(omega_total[k - 1]));
        const std::complex<double> cur_plus = theta_dot[k] * std::exp(-1i * phase);
        const std::complex<double> cur_minus = theta_dot[k] * std::exp(1i * phase);
        sum_plus += 0.5 * dt * (prev_plus + cur_plus);
        sum_minus += 0.5 * dt * (prev_minus + cur_minus);
        prev_plus = cur_plus;
        prev_minus = cur_minus;
    }
    return {0.5 * std::norm(sum_plus), 0.5 * std::norm(sum_minus)};
}

double dark_state_survival(std::span<const double> times, std::span<const double> theta,
                           double Gamma) {
    if (times.size() != theta.size()) {
        throw Error(ErrorKind::ParameterDomain, "dark_state_survival: size mismatch");
    }
    if (!(Gamma >= 0.0)) throw Error(ErrorKind::ParameterDomain, "Gamma must be >= 0");
    double integral = 0.0;
    for (std::size_t k = 1; k < times.size(); ++k) {
        const double s0 = std::sin(theta[k - 1]);
        const double s1 = std::sin(theta[k]);
        integral += 0.5 * (times[k] - times[k - 1]) * (s0 * s0 + s1 * s1);
    }
    return std::exp(-Gamma * integral);
}

std::pair<double, double> avoided_crossing_energies(double omega_ef, double omega_s,
                                                    double g_rf) {
    const double mean = 0.5 * (omega_ef + omega_s);
    const double half_gap = 0.5 * std::hypot(omega_ef - omega_s, g_rf);
    return {mean + half_gap, mean - half_gap};
}

}  // namespace fluxinit
