#pragma once

#include "fluxinit/circuit_spectrum.hpp"
#include "fluxinit/dynamics.hpp"

namespace fluxinit {

/// Fluxonium (truncated to its lowest levels) coupled to a lossy cavity mode.
struct FullModelSpec {
    double omega_r = 0.0;         // cavity frequency, GHz
    double Gamma = 1.0 / 40.0;    // photon loss rate, 1/ns
    int photon_dim = 4;
    int fluxonium_levels = 6;
    double g_coupled = 0.0;       // g_r |<i|n_q|j>| on the triple's coupling levels, GHz
    TripleKind kind = TripleKind::Red;
    double dt = 0.005;            // RK4 step, ns
    int basis_dim = kDefaultBasisDim;

    void validate() const;
};

struct ProductState {
    int level = 0;
    int photons = 0;
};

/// "g0", "e1", ... with letters g, e, f, h, i, j for the first six levels and "l<k>" beyond.
std::string product_label(int level, int photons);

/// Lindblad evolution of rho under
///   H = sum_k E_k |k><k| + omega_r a^dag a + (g_r/2) n_q (i(a^dag - a)) + V_d(t) cos(omega_p t) n_q,
/// with one collapse operator sqrt(Gamma) a. The flux is params.phi_ext plus the
/// schedule's pulse amplitude; g_r and V_d are fixed by g_coupled and Omega_ef(t)
/// through the charge matrix elements of the triple. Integrated in the interaction
/// picture of the bare energies. Populations of every product state are reported;
/// p_ground tracks the triple's target state (|g0> red, |e0> blue).
Trajectory evolve_full_lindblad(const CircuitParams& params, const FullModelSpec& spec,
                                const ControlSchedule& schedule, ProductState initial);

}  // namespace fluxinit
