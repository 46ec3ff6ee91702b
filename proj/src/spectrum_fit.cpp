#include "fluxinit/spectrum_fit.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "fluxinit/errors.hpp"
#include "fluxinit/least_squares.hpp"
#include "fluxinit/units.hpp"

namespace fluxinit {

FluxSpectrumFit fit_flux_spectrum(std::span<const double> phi_ext, std::span<const double> f_ge,
                                  const CircuitParams& initial, int basis_dim) {
    const std::size_t n = phi_ext.size();
    if (f_ge.size() != n) throw Error(ErrorKind::ParameterDomain, "fit_flux_spectrum: size mismatch");
    if (n < 8) {
        throw Error(ErrorKind::DegenerateInput,
                    fmt::format("fit_flux_spectrum needs >= 8 flux points (got {})", n));
    }
    const auto [lo, hi] = std::minmax_element(phi_ext.begin(), phi_ext.end());
    if (!(*hi - *lo >= 0.2 * kTwoPi)) {
        throw Error(ErrorKind::DegenerateInput,
                    fmt::format("fit_flux_spectrum: flux span {} rad below 0.2 * 2 pi", *hi - *lo));
    }
    CircuitParams start = initial;
    start.phi_ext = 0.0;
    start.validate();

    // Fit in log-energies so every trial point stays in the physical domain.
    Eigen::VectorXd x0(3);
    x0 << std::log(start.E_C), std::log(start.E_L), std::log(start.E_J);
    ResidualFunction resid = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
        const CircuitParams p{std::exp(x(0)), std::exp(x(1)), std::exp(x(2)), 0.0};
        for (std::size_t k = 0; k < n; ++k) {
            r(k) = solve_spectrum(p.with_flux(phi_ext[k]), basis_dim).omega_ge() - f_ge[k];
        }
    };
    // A relative step of 1e-7 in each energy is below 1e-5 GHz at these scales.
    LeastSquaresOptions opts;
    opts.xtol = 1e-7;
    opts.ftol = 1e-14;
    opts.max_evaluations = 600;
    const auto lsq = levenberg_marquardt(resid, x0, static_cast<int>(n), opts);
    if (!lsq.converged) {
        throw Error(ErrorKind::FitFailure,
                    fmt::format("fit_flux_spectrum did not converge after {} evaluations",
                                lsq.evaluations));
    }
    FluxSpectrumFit fit;
    fit.params = {std::exp(lsq.x(0)), std::exp(lsq.x(1)), std::exp(lsq.x(2)), 0.0};
    fit.uncertainties << fit.params.E_C * lsq.uncertainties(0), fit.params.E_L * lsq.uncertainties(1),
        fit.params.E_J * lsq.uncertainties(2);
    fit.residual_rms = lsq.rms;
    fit.evaluations = lsq.evaluations;
    fit.converged = lsq.converged;
    return fit;
}

}  // namespace fluxinit
