#pragma once

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fluxinit/circuit_spectrum.hpp"

namespace fluxinit {

using Matrix3c = Eigen::Matrix3cd;
using Vector3c = Eigen::Vector3cd;

/// The three product states spanning the reduced model, in (a, b, c) order.
///   red:  (|e0>, |f0>, |g1>)  drive e-f, coupling g-f
///   blue: (|g0>, |h0>, |e1>)  drive g-h, coupling e-h
struct SubspaceTriple {
    TripleKind kind = TripleKind::Red;
    std::array<std::string, 3> labels;
    std::pair<int, int> drive_levels;     // fluxonium levels joined by the microwave drive
    std::pair<int, int> coupling_levels;  // fluxonium levels entering g_r |<i|n_q|j>|
    std::array<int, 3> qubit_level;       // fluxonium level of states a, b, c
    std::array<int, 3> photons;           // cavity photon number of states a, b, c
};

SubspaceTriple subspace_triple(TripleKind kind);

/// Lab-frame energies of states (a, b, c) in GHz, e.g. (omega_ge, omega_gf, omega_r) for red.
struct LabFrequencies {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

struct ReducedParams {
    double Omega_ef = 0.0;     // drive strength, GHz
    double Delta = 0.0;        // omega_gf - omega_r, GHz
    double g_rf = 0.0;         // effective b-c coupling, GHz
    double Gamma = 1.0 / 40.0; // cavity photon emission rate, 1/ns
    double omega_s = 0.0;      // sideband frequency, GHz
    double omega_p = 0.0;      // drive frequency, GHz
    LabFrequencies lab;
    double g_re = 0.0;         // a-c coupling, lab frame only (dropped under RWA)

    void validate() const;
};

/// Fills the frequencies of a ReducedParams from a fluxonium spectrum: lab
/// energies, omega_s, Delta, and omega_p = omega_s (drive on the sideband).
ReducedParams reduced_params_from_spectrum(const EigenSolution& sol, TripleKind kind,
                                           double omega_r, double g_coupled, double Gamma,
                                           double Omega_ef = 0.0);

/// 3x3 lab-frame generator in rad/ns, with drive_value cos(omega_p t)
/// on the a-b entries and -i Gamma/2 on the cavity state.
Matrix3c lab_frame_hamiltonian(const ReducedParams& p, double t, double drive_value);

/// RWA generator at omega_p = omega_s:
///   1/2 [[0, Omega, 0], [Omega, 2 Delta, g], [0, g, -i Gamma]]   (rad/ns)
Matrix3c rotating_frame_hamiltonian(const ReducedParams& p);

/// RWA generator for arbitrary drive frequency: diagonal (0, omega_ab - omega_p,
/// omega_ac - omega_p - i Gamma/2) built from the lab energies.
Matrix3c rotating_frame_hamiltonian_detuned(const ReducedParams& p);

struct DressedState {
    Eigen::Vector3d vector;  // unnormalized, (a, b, c) components
    double rate = 0.0;       // |Omega_ef g_rf / (2 Delta)|, GHz
};

/// First-order dressed |g1> and the sideband matrix element, with
/// g_rf = g_r_scale * matrix_element. Throws ErrorKind::DispersiveRegime when
/// |Delta| < 3 g_rf or Delta == 0.
DressedState dressed_g1_and_rate(const ReducedParams& p, double matrix_element, double g_r_scale);

struct MixingAngles {
    double theta = 0.0;
    double phi = 0.0;
};

struct StirapEigensystem {
    MixingAngles angles;
    Eigen::Vector3d psi_plus;
    Eigen::Vector3d psi_zero;
    Eigen::Vector3d psi_minus;
    std::array<double, 3> energies{};  // (E+, 0, E-) in GHz, Gamma = 0
};

/// tan(theta) = Omega/g, tan(phi) = sqrt(g^2+Omega^2) / (sqrt(Delta^2+g^2+Omega^2) + Delta).
StirapEigensystem stirap_eigensystem(double Omega_ef, double g_rf, double Delta);

/// Columns (psi+, psi0, psi-) in the (a, b, c) basis.
Eigen::Matrix3d adiabatic_rotation(double theta, double phi);

/// Non-Hermitian generator in the instantaneous eigenbasis (psi+, psi0, psi-)
/// at Delta = 0, rad/ns. theta_dot in rad/ns, frequencies in GHz.
Matrix3c adiabatic_frame_hamiltonian(double theta, double theta_dot, double Omega_ef, double g_rf,
                                     double Gamma);

struct LeakagePair {
    double plus = 0.0;
    double minus = 0.0;
};

/// Non-adiabatic leakage into psi+/psi- from first-order perturbation theory,
///   P = 1/2 | int theta_dot exp(-/+ i int Omega/2) dt |^2,
/// with theta_dot by finite differences on the grid and trapezoidal quadrature.
/// `omega_total` is sqrt(Omega_ef^2 + g_rf^2) in GHz.
LeakagePair nonadiabatic_leakage(std::span<const double> times, std::span<const double> theta,
                                 std::span<const double> omega_total);

/// exp(-Gamma int sin^2 theta dt), trapezoidal on the sample grid.
double dark_state_survival(std::span<const double> times, std::span<const double> theta,
                           double Gamma);

/// E+- = (omega_ef + omega_s)/2 +- sqrt((omega_ef - omega_s)^2 + g^2)/2, GHz.
std::pair<double, double> avoided_crossing_energies(double omega_ef, double omega_s, double g_rf);

/// Second-order finite-difference derivative on a possibly non-uniform grid.
std::vector<double> gradient(std::span<const double> times, std::span<const double> values);

}  // namespace fluxinit
