#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace fluxinit {

/// Fluxonium circuit energies (E/h in GHz) and external flux phase (rad).
struct CircuitParams {
    double E_C = 0.0;
    double E_L = 0.0;
    double E_J = 0.0;
    double phi_ext = 0.0;

    /// Throws ErrorKind::ParameterDomain when an energy is non-positive or a value is non-finite.
    void validate() const;
    CircuitParams with_flux(double phi) const {
        CircuitParams p = *this;
        p.phi_ext = phi;
        return p;
    }
};

inline constexpr int kDefaultBasisDim = 80;
inline constexpr int kMinBasisDim = 20;

/// Eigenpairs of H/h = 4 E_C n^2 + E_L phi^2 / 2 - E_J cos(phi - phi_ext), expressed
/// in the harmonic-oscillator number basis of the inductive part.
///
/// The Hamiltonian is real symmetric in this basis so the eigenvectors are
/// real and orthonormal; columns are eigenstates, ordered by ascending energy.
struct EigenSolution {
    int basis_dim = 0;
    Eigen::VectorXd energies;
    Eigen::MatrixXd eigenvectors;
    /// Charge-operator zero-point scale: n = i n_zpf (a^dag - a).
    double n_zpf = 0.0;

    double transition(int i, int j) const { return energies(j) - energies(i); }
    double omega_ge() const { return transition(0, 1); }
    double omega_ef() const { return transition(1, 2); }
    double omega_gf() const { return transition(0, 2); }
    double omega_gh() const { return transition(0, 3); }
};

/// Diagonalizes the fluxonium Hamiltonian in a truncated oscillator basis.
/// Requires basis_dim >= kMinBasisDim.
EigenSolution solve_spectrum(const CircuitParams& params, int basis_dim = kDefaultBasisDim);

/// |<i|n_q|j>| for eigenstates i, j of `sol`.
double charge_matrix_element(const EigenSolution& sol, int i, int j);

/// Charge operator in the eigenbasis, restricted to the lowest `levels` states.
/// Entries are the magnitudes times a common phase convention (purely imaginary
/// in the oscillator basis, returned here as the real coefficient of i).
Eigen::MatrixXd charge_operator_eigenbasis(const EigenSolution& sol, int levels);

struct MatrixElementCurve {
    std::vector<double> flux_offsets;    // delta phi_ext, rad
    std::vector<double> values;          // |<0|n_q|2>|
    std::vector<double> sideband_freqs;  // omega_r - omega_ge, GHz
};

/// Sweeps delta phi_ext about the sweet spot phi_ext = pi. The phi_ext field of
/// `params` is ignored.
MatrixElementCurve matrix_element_flux_sweep(const CircuitParams& params, double omega_r,
                                             std::span<const double> offsets,
                                             int basis_dim = kDefaultBasisDim);

enum class TripleKind { Red, Blue };

const char* to_string(TripleKind kind);
TripleKind triple_kind_from_string(const std::string& s);

/// Detuning whose zero defines the sideband resonance at a given flux offset:
///   red:  omega_gf - omega_r
///   blue: omega_gh - (omega_r + omega_ge)
double resonance_detuning(const CircuitParams& params, double omega_r, TripleKind kind,
                          double flux_offset, int basis_dim = kDefaultBasisDim);

/// Bracketed bisection on (0, pi) for the flux offset where the detuning
/// changes sign, to `tolerance` rad. Throws ErrorKind::NoResonance if the
/// bracket has no sign change.
double find_resonance_flux(const CircuitParams& params, double omega_r, TripleKind kind,
                           int basis_dim = kDefaultBasisDim, double tolerance = 1e-6);

}  // namespace fluxinit
