#include "fluxinit/circuit_spectrum.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include <fmt/format.h>

#include "fluxinit/errors.hpp"

namespace fluxinit {

void CircuitParams::validate() const {
    std::vector<std::string> problems;
    auto positive = [&](const char* name, double v) {
        if (!std::isfinite(v) || v <= 0.0) {
            problems.push_back(fmt::format("{} must be positive and finite (got {})", name, v));
        }
    };
    positive("E_C", E_C);
    positive("E_L", E_L);
    positive("E_J", E_J);
    if (!std::isfinite(phi_ext)) {
        problems.push_back("phi_ext must be finite");
    }
    if (!problems.empty()) {
        std::string msg = "invalid circuit parameters:";
        for (const auto& p : problems) msg += " " + p + ";";
        throw Error(ErrorKind::ParameterDomain, msg);
    }
}

namespace {

// Oscillator-basis Hamiltonian with E_J allowed to be zero (harmonic limit).
Eigen::MatrixXd build_hamiltonian(const CircuitParams& p, int dim, double& n_zpf) {
    const double phi_zpf = std::pow(8.0 * p.E_C / p.E_L, 0.25);
    const double phase_scale = phi_zpf / std::numbers::sqrt2;
    n_zpf = 1.0 / (std::numbers::sqrt2 * phi_zpf);

    // phi = phase_scale (a + a^dag), tridiagonal with zero diagonal.
    Eigen::MatrixXd phase = Eigen::MatrixXd::Zero(dim, dim);
    for (int k = 0; k + 1 < dim; ++k) {
        const double v = phase_scale * std::sqrt(static_cast<double>(k + 1));
        phase(k, k + 1) = v;
        phase(k + 1, k) = v;
    }

    // Inductive and capacitive parts combine to the oscillator term; build them
    // explicitly from a^dag a so truncation treats both quadratures the same way.
    const double omega_lc = std::sqrt(8.0 * p.E_C * p.E_L);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) h(k, k) = omega_lc * (k + 0.5);

    if (p.E_J != 0.0) {
        // cos(phi - phi_ext) through the spectral decomposition of the truncated phi.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> phase_eig(phase);
        if (phase_eig.info() != Eigen::Success) {
            throw Error(ErrorKind::Numerical, "phase-operator diagonalization failed");
        }
        const Eigen::VectorXd c = (phase_eig.eigenvalues().array() - p.phi_ext).cos();
        const Eigen::MatrixXd& u = phase_eig.eigenvectors();
        h.noalias() -= p.E_J * (u * c.asDiagonal() * u.transpose());
    }
    return h;
}

}  // namespace

EigenSolution solve_spectrum(const CircuitParams& params, int basis_dim) {
    if (basis_dim < kMinBasisDim) {
        throw Error(ErrorKind::ParameterDomain,
                    fmt::format("basis_dim must be >= {} (got {})", kMinBasisDim, basis_dim));
    }
    // The harmonic limit E_J = 0 is allowed here; validate the rest.
    if (!(params.E_C > 0.0) || !(params.E_L > 0.0) || !(params.E_J >= 0.0) ||
        !std::isfinite(params.E_C) || !std::isfinite(params.E_L) || !std::isfinite(params.E_J) ||
        !std::isfinite(params.phi_ext)) {
        throw Error(ErrorKind::ParameterDomain,
                    fmt::format("invalid circuit parameters: E_C={} E_L={} E_J={} phi_ext={}",
                                params.E_C, params.E_L, params.E_J, params.phi_ext));
    }

    EigenSolution sol;
    sol.basis_dim = basis_dim;
    const Eigen::MatrixXd h = build_hamiltonian(params, basis_dim, sol.n_zpf);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    if (eig.info() != Eigen::Success) {
        throw Error(ErrorKind::Numerical,
                    fmt::format("fluxonium eigensolver did not converge (basis_dim={}, E_C={}, "
                                "E_L={}, E_J={}, phi_ext={})",
                                basis_dim, params.E_C, params.E_L, params.E_J, params.phi_ext));
    }
    sol.energies = eig.eigenvalues();
    sol.eigenvectors = eig.eigenvectors();
    return sol;
}

Eigen::MatrixXd charge_operator_eigenbasis(const EigenSolution& sol, int levels) {
    if (levels < 1 || levels > sol.basis_dim) {
        throw Error(ErrorKind::IndexOutOfRange,
                    fmt::format("levels={} outside [1, {}]", levels, sol.basis_dim));
    }
    // n = i n_zpf (a^dag - a); the real antisymmetric part B = n_zpf (a^dag - a).
    const int dim = sol.basis_dim;
    const auto v = sol.eigenvectors.leftCols(levels);
    Eigen::MatrixXd bv(dim, levels);
    for (int col = 0; col < levels; ++col) {
        for (int k = 0; k < dim; ++k) {
            double acc = 0.0;
            // (a^dag x)_k = sqrt(k) x_{k-1};  (a x)_k = sqrt(k+1) x_{k+1}
            if (k > 0) acc += std::sqrt(static_cast<double>(k)) * v(k - 1, col);
            if (k + 1 < dim) acc -= std::sqrt(static_cast<double>(k + 1)) * v(k + 1, col);
            bv(k, col) = sol.n_zpf * acc;
        }
    }
    return v.transpose() * bv;
}

double charge_matrix_element(const EigenSolution& sol, int i, int j) {
    if (i < 0 || j < 0 || i >= sol.basis_dim || j >= sol.basis_dim) {
        throw Error(ErrorKind::IndexOutOfRange,
                    fmt::format("level index ({}, {}) outside basis of {}", i, j, sol.basis_dim));
    }
    // Fixed operand order so the result is bitwise symmetric in (i, j).
    if (i > j) std::swap(i, j);
    const int dim = sol.basis_dim;
    const auto vi = sol.eigenvectors.col(i);
    const auto vj = sol.eigenvectors.col(j);
    double acc = 0.0;
    for (int k = 0; k < dim; ++k) {
        double bvj = 0.0;
        if (k > 0) bvj += std::sqrt(static_cast<double>(k)) * vj(k - 1);
        if (k + 1 < dim) bvj -= std::sqrt(static_cast<double>(k + 1)) * vj(k + 1);
        acc += vi(k) * bvj;
    }
    return std::abs(sol.n_zpf * acc);
}

MatrixElementCurve matrix_element_flux_sweep(const CircuitParams& params, double omega_r,
                                             std::span<const double> offsets, int basis_dim) {
    MatrixElementCurve curve;
    curve.flux_offsets.reserve(offsets.size());
    curve.values.reserve(offsets.size());
    curve.sideband_freqs.reserve(offsets.size());
    for (double d : offsets) {
        if (!std::isfinite(d)) {
            throw Error(ErrorKind::ParameterDomain, "flux offsets must be finite");
        }
        const auto sol = solve_spectrum(params.with_flux(std::numbers::pi + d), basis_dim);
        curve.flux_offsets.push_back(d);
        curve.values.push_back(charge_matrix_element(sol, 0, 2));
        curve.sideband_freqs.push_back(omega_r - sol.omega_ge());
    }
    return curve;
}

const char* to_string(TripleKind kind) { return kind == TripleKind::Red ? "red" : "blue"; }

TripleKind triple_kind_from_string(const std::string& s) {
    if (s == "red") return TripleKind::Red;
    if (s == "blue") return TripleKind::Blue;
    throw Error(ErrorKind::ParameterDomain, fmt::format("unknown triple kind '{}'", s));
}

double resonance_detuning(const CircuitParams& params, double omega_r, TripleKind kind,
                          double flux_offset, int basis_dim) {
    const auto sol = solve_spectrum(params.with_flux(std::numbers::pi + flux_offset), basis_dim);
    if (kind == TripleKind::Red) return sol.omega_gf() - omega_r;
    return sol.omega_gh() - (omega_r + sol.omega_ge());
}

double find_resonance_flux(const CircuitParams& params, double omega_r, TripleKind kind,
                           int basis_dim, double tolerance) {
    double lo = 0.0;
    double hi = std::numbers::pi;
    double f_lo = resonance_detuning(params, omega_r, kind, lo, basis_dim);
    const double f_hi = resonance_detuning(params, omega_r, kind, hi, basis_dim);
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo > 0.0) == (f_hi > 0.0)) {
        throw Error(ErrorKind::NoResonance,
                    fmt::format("no {} sideband resonance for omega_r={} GHz: detuning is {} GHz "
                                "at offset 0 and {} GHz at offset pi",
                                to_string(kind), omega_r, f_lo, f_hi));
    }
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = resonance_detuning(params, omega_r, kind, mid, basis_dim);
        if (f_mid == 0.0) return mid;
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace fluxinit
