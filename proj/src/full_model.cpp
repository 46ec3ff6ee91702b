#include "fluxinit/full_model.hpp"

#include <cmath>
#include <complex>

#include <fmt/format.h>

#include "fluxinit/errors.hpp"
#include "fluxinit/units.hpp"

namespace fluxinit {

using namespace std::complex_literals;
using MatrixXc = Eigen::MatrixXcd;

void FullModelSpec::validate() const {
    std::vector<std::string> problems;
    if (!(omega_r > 0.0)) problems.push_back(fmt::format("omega_r must be > 0 (got {})", omega_r));
    if (!(Gamma >= 0.0)) problems.push_back(fmt::format("Gamma must be >= 0 (got {})", Gamma));
    if (photon_dim < 2) problems.push_back(fmt::format("photon_dim must be >= 2 (got {})", photon_dim));
    if (fluxonium_levels < 4) {
        problems.push_back(fmt::format("fluxonium_levels must be >= 4 (got {})", fluxonium_levels));
    }
    if (!(g_coupled >= 0.0)) problems.push_back(fmt::format("g_coupled must be >= 0 (got {})", g_coupled));
    if (!(dt > 0.0)) problems.push_back(fmt::format("dt must be > 0 (got {})", dt));
    if (basis_dim < std::max(kMinBasisDim, fluxonium_levels)) {
        problems.push_back(fmt::format("basis_dim too small ({})", basis_dim));
    }
    if (!problems.empty()) throw ValidationError(std::move(problems));
}

std::string product_label(int level, int photons) {
    static const char* letters = "gefhij";
    if (level >= 0 && level < 6) return fmt::format("{}{}", letters[level], photons);
    return fmt::format("l{}_{}", level, photons);
}

Trajectory evolve_full_lindblad(const CircuitParams& params, const FullModelSpec& spec,
                                const ControlSchedule& schedule, ProductState initial) {
    spec.validate();
    const int nq = spec.fluxonium_levels;
    const int nr = spec.photon_dim;
    const int dim = nq * nr;
    if (initial.level < 0 || initial.level >= nq || initial.photons < 0 || initial.photons >= nr) {
        throw Error(ErrorKind::IndexOutOfRange,
                    fmt::format("initial state ({}, {}) outside {}x{} truncation", initial.level,
                                initial.photons, nq, nr));
    }

    const auto sol = solve_spectrum(params.with_flux(params.phi_ext + schedule.flux_amplitude),
                                    spec.basis_dim);
    const Eigen::MatrixXd charge = charge_operator_eigenbasis(sol, nq);  // n_q = i * charge
    const auto triple = subspace_triple(spec.kind);
    const double n_couple =
        std::abs(charge(triple.coupling_levels.first, triple.coupling_levels.second));
    const double n_drive = std::abs(charge(triple.drive_levels.first, triple.drive_levels.second));
    if (n_couple < 1e-12 || n_drive < 1e-12) {
        throw Error(ErrorKind::DegenerateInput,
                    fmt::format("vanishing charge matrix element (coupling {}, drive {}) at this flux",
                                n_couple, n_drive));
    }
    const double g_r = spec.g_coupled / n_couple;

    // Bare energies, indices k = level * nr + photons.
    Eigen::VectorXd bare(dim);
    for (int q = 0; q < nq; ++q) {
        for (int m = 0; m < nr; ++m) {
            bare(q * nr + m) = angular(sol.energies(q) - sol.energies(0) + spec.omega_r * m);
        }
    }
    // n_q x 1 and n_q x n_r with n_q = i C and n_r = i (a^dag - a).
    MatrixXc drive_op = MatrixXc::Zero(dim, dim);
    MatrixXc coupling_op = MatrixXc::Zero(dim, dim);
    for (int q1 = 0; q1 < nq; ++q1) {
        for (int q2 = 0; q2 < nq; ++q2) {
            const std::complex<double> nqe = 1i * charge(q1, q2);
            if (nqe == 0.0) continue;
            for (int m = 0; m < nr; ++m) {
                drive_op(q1 * nr + m, q2 * nr + m) = nqe;
                // <m+1| i(a^dag - a) |m> = i sqrt(m+1), <m-1| ... |m> = -i sqrt(m)
                if (m + 1 < nr) {
                    coupling_op(q1 * nr + m + 1, q2 * nr + m) = nqe * 1i * std::sqrt(m + 1.0);
                }
                if (m > 0) coupling_op(q1 * nr + m - 1, q2 * nr + m) = nqe * (-1i) * std::sqrt(double(m));
            }
        }
    }
    coupling_op *= 0.5 * angular(g_r);
    drive_op *= angular(1.0 / n_drive);  // multiplied by Omega_ef(t) cos(omega_p t)

    const double gamma = spec.Gamma;
    const double wp = angular(schedule.omega_p);

    // d rho/dt = -i (K - K^dag) + Gamma a rho a^dag with K = H_eff rho and
    // H_eff = H_I(t) - i Gamma/2 a^dag a.
    MatrixXc h(dim, dim);
    MatrixXc k(dim, dim);
    Eigen::VectorXcd phase(dim);
    auto derivative = [&](double t, const MatrixXc& rho, MatrixXc& out) {
        for (int j = 0; j < dim; ++j) phase(j) = std::exp(1i * (bare(j) * t));
        const double drive = schedule.omega_ef(t) * std::cos(wp * t);
        for (int c = 0; c < dim; ++c) {
            for (int r = 0; r < dim; ++r) {
                const std::complex<double> v = coupling_op(r, c) + drive * drive_op(r, c);
                h(r, c) = v == 0.0 ? 0.0 : v * phase(r) * std::conj(phase(c));
            }
        }
        for (int j = 0; j < dim; ++j) h(j, j) += -0.5i * gamma * double(j % nr);
        k.noalias() = h * rho;
        out = -1i * (k - k.adjoint());
        if (gamma != 0.0) {
            // a rho a^dag: (m, m') <- sqrt((m+1)(m'+1)) rho(m+1, m+1') within each qubit block.
            for (int c = 0; c < dim; ++c) {
                const int mc = c % nr;
                if (mc + 1 >= nr) continue;
                for (int r = 0; r < dim; ++r) {
                    const int mr = r % nr;
                    if (mr + 1 >= nr) continue;
                    out(r, c) += gamma * std::sqrt((mr + 1.0) * (mc + 1.0)) * rho(r + 1, c + 1);
                }
            }
        }
    };

    Trajectory tr;
    tr.times = schedule.times;
    for (int q = 0; q < nq; ++q) {
        for (int m = 0; m < nr; ++m) tr.labels.push_back(product_label(q, m));
    }
    tr.populations.assign(dim, {});
    for (auto& p : tr.populations) p.reserve(tr.times.size());
    const int target = (spec.kind == TripleKind::Red ? 0 : 1) * nr;

    double top_level = 0.0;
    double top_photon = 0.0;
    double max_trace_error = 0.0;
    auto record = [&](const MatrixXc& rho, double t) {
        if (!rho.allFinite()) {
            throw Error(ErrorKind::Numerical,
                        fmt::format("density matrix became non-finite at t={} ns", t));
        }
        double trace = 0.0;
        for (int j = 0; j < dim; ++j) {
            const double p = rho(j, j).real();
            tr.populations[j].push_back(p);
            trace += p;
            if (j / nr == nq - 1) top_level = std::max(top_level, p);
            if (j % nr == nr - 1) top_photon = std::max(top_photon, p);
        }
        max_trace_error = std::max(max_trace_error, std::abs(trace - 1.0));
        tr.p_ground.push_back(rho(target, target).real());
    };

    MatrixXc rho = MatrixXc::Zero(dim, dim);
    const int init = initial.level * nr + initial.photons;
    rho(init, init) = 1.0;
    MatrixXc k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), tmp(dim, dim);
    const auto& times = schedule.times;
    record(rho, times.front());
    for (std::size_t s = 1; s < times.size(); ++s) {
        const double span = times[s] - times[s - 1];
        const int sub = std::max(1, static_cast<int>(std::ceil(span / spec.dt - 1e-9)));
        const double dt = span / sub;
        for (int j = 0; j < sub; ++j) {
            const double t = times[s - 1] + j * dt;
            derivative(t, rho, k1);
            tmp = rho + 0.5 * dt * k1;
            derivative(t + 0.5 * dt, tmp, k2);
            tmp = rho + 0.5 * dt * k2;
            derivative(t + 0.5 * dt, tmp, k3);
            tmp = rho + dt * k3;
            derivative(t + dt, tmp, k4);
            rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        record(rho, times[s]);
    }

    if (top_level > 1e-4) {
        tr.warnings.push_back(fmt::format(
            "truncation: top fluxonium level reached population {:.3g} (> 1e-4)", top_level));
    }
    if (top_photon > 1e-4) {
        tr.warnings.push_back(fmt::format(
            "truncation: top photon level reached population {:.3g} (> 1e-4)", top_photon));
    }
    if (max_trace_error > 1e-7) {
        tr.warnings.push_back(fmt::format("trace drifted by {:.3g}", max_trace_error));
    }
    return tr;
}

}  // namespace fluxinit
