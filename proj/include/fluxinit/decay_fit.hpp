#pragma once

#include <span>

namespace fluxinit {

struct PhotonDecayFit {
    double tau = 0.0;        // ns; +inf when infinite_tau
    double amplitude = 0.0;  // GHz
    double offset = 0.0;     // GHz
    double tau_uncertainty = 0.0;
    double residual_rms = 0.0;
    bool infinite_tau = false;
};

/// Least-squares fit of shift(t) = amplitude exp(-t / tau) + offset to the
/// ac-Stark frequency shift after an idle delay. Needs >= 5 points. A constant
/// series returns infinite_tau; a growing or non-decaying one throws
/// ErrorKind::FitFailure.
PhotonDecayFit fit_photon_decay(std::span<const double> delays, std::span<const double> shifts);

}  // namespace fluxinit
