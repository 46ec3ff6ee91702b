#pragma once

#include <vector>

#include <Eigen/Dense>

namespace fluxinit {

/// Spectroscopy response on a (probe frequency x flux offset) grid.
struct CrossingDataset {
    std::vector<double> flux_offsets;  // rad
    std::vector<double> probe_freqs;   // GHz, ascending
    Eigen::MatrixXd amplitude;         // rows: probe frequency, columns: flux offset

    void validate() const;
};

/// Two peaks per flux column, upper first. Columns with fewer than two usable peaks are skipped.
struct ColumnPeaks {
    double flux = 0.0;
    double upper = 0.0;
    double lower = 0.0;
};

/// Two largest local maxima per column (second at least `min_ratio` of the first),
/// refined by quadratic interpolation.
std::vector<ColumnPeaks> extract_peaks(const CrossingDataset& data, double min_ratio = 0.2);

struct CrossingFit {
    double g_rf = 0.0;             // GHz, minimum gap
    double resonance_flux = 0.0;   // rad
    double resonance_freq = 0.0;   // GHz
    double ef_intercept = 0.0;     // omega_ef(d) = ef_intercept + ef_slope d
    double ef_slope = 0.0;
    double s_intercept = 0.0;      // omega_s(d) = s_intercept + s_slope d
    double s_slope = 0.0;
    double g_uncertainty = 0.0;
    double residual_rms = 0.0;     // GHz
    std::size_t columns_used = 0;
};

/// Nonlinear least squares of the extracted peaks against
///   E+- = (w_ef + w_s)/2 +- sqrt((w_ef - w_s)^2 + g^2)/2,
/// with both bare lines linear in the flux offset. The line with the smaller
/// |slope| is reported as omega_ef; omega_s = omega_r - omega_ge follows the
/// steeper qubit line near the crossing. Throws ErrorKind::FitFailure with fewer than
/// 5 usable columns or when the residual rms exceeds `max_residual_rms` GHz.
CrossingFit fit_avoided_crossing(const CrossingDataset& data, double max_residual_rms = 0.01);

}  // namespace fluxinit
