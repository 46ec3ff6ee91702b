#pragma once

#include <span>

#include "fluxinit/circuit_spectrum.hpp"

namespace fluxinit {

struct FluxSpectrumFit {
    CircuitParams params;          // phi_ext unset (0)
    Eigen::Vector3d uncertainties = Eigen::Vector3d::Zero();  // E_C, E_L, E_J, GHz
    double residual_rms = 0.0;     // GHz
    int evaluations = 0;
    bool converged = false;
};

/// Least squares of omega_ge(phi_ext) from solve_spectrum against measured f_ge over
/// (E_C, E_L, E_J), Jacobian by finite differences. Needs >= 8 samples spanning
/// >= 0.2 * 2 pi of flux. Throws ErrorKind::FitFailure on non-convergence.
FluxSpectrumFit fit_flux_spectrum(std::span<const double> phi_ext, std::span<const double> f_ge,
                                  const CircuitParams& initial, int basis_dim = 60);

}  // namespace fluxinit
