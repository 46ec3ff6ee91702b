#include "fluxinit/decay_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "fluxinit/errors.hpp"
#include "fluxinit/least_squares.hpp"

namespace fluxinit {

PhotonDecayFit fit_photon_decay(std::span<const double> delays, std::span<const double> shifts) {
    const std::size_t n = delays.size();
    if (shifts.size() != n) throw Error(ErrorKind::ParameterDomain, "fit_photon_decay: size mismatch");
    if (n < 5) {
        throw Error(ErrorKind::ParameterDomain,
                    fmt::format("fit_photon_decay needs >= 5 delay points (got {})", n));
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (!std::isfinite(delays[k]) || !std::isfinite(shifts[k])) {
            throw Error(ErrorKind::ParameterDomain, "fit_photon_decay: non-finite input");
        }
    }
    const auto [lo_it, hi_it] = std::minmax_element(shifts.begin(), shifts.end());
    const double scale = std::max({1.0, std::abs(*lo_it), std::abs(*hi_it)});
    PhotonDecayFit fit;
    if (*hi_it - *lo_it <= 1e-12 * scale) {
        fit.tau = std::numeric_limits<double>::infinity();
        fit.offset = shifts[0];
        fit.infinite_tau = true;
        return fit;
    }

    std::vector<std::size_t> order(n);
    for (std::size_t k = 0; k < n; ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return delays[a] < delays[b]; });
    const double t0 = delays[order.front()];
    const double span = delays[order.back()] - t0;
    if (!(span > 0.0)) throw Error(ErrorKind::DegenerateInput, "fit_photon_decay: delays identical");

    // Start: offset at the last sample, amplitude from the first, tau from the 1/e crossing.
    const double c0 = shifts[order.back()];
    const double a0 = shifts[order.front()] - c0;
    double tau0 = span / 3.0;
    for (std::size_t k : order) {
        if (std::abs(shifts[k] - c0) <= std::abs(a0) / std::exp(1.0)) {
            tau0 = std::max(delays[k] - t0, span / 50.0);
            break;
        }
    }
    // Parameters (A, log tau, c) on the shifted time axis.
    Eigen::VectorXd x0(3);
    x0 << a0, std::log(tau0), c0;
    ResidualFunction resid = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
        const double tau = std::exp(x(1));
        for (std::size_t k = 0; k < n; ++k) {
            r(k) = x(0) * std::exp(-(delays[k] - t0) / tau) + x(2) - shifts[k];
        }
    };
    const auto lsq = levenberg_marquardt(resid, x0, static_cast<int>(n));
    const double tau = std::exp(lsq.x(1));
    if (!std::isfinite(tau) || tau > 1e3 * span) {
        throw Error(ErrorKind::FitFailure,
                    fmt::format("fit_photon_decay: signal does not decay (tau={} ns over a {} ns span)",
                                tau, span));
    }
    if (lsq.rms > 0.2 * (*hi_it - *lo_it)) {
        throw Error(ErrorKind::FitFailure,
                    fmt::format("fit_photon_decay: data not described by a decaying exponential "
                                "(residual rms {} vs range {})",
                                lsq.rms, *hi_it - *lo_it));
    }
    fit.tau = tau;
    fit.amplitude = lsq.x(0) * std::exp(t0 / tau);
    fit.offset = lsq.x(2);
    fit.tau_uncertainty = tau * lsq.uncertainties(1);
    fit.residual_rms = lsq.rms;
    return fit;
}

}  // namespace fluxinit
