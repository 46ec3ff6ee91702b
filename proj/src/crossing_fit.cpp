#include "fluxinit/crossing_fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "fluxinit/errors.hpp"
#include "fluxinit/least_squares.hpp"
#include "fluxinit/reduced_model.hpp"

namespace fluxinit {

void CrossingDataset::validate() const {
    std::vector<std::string> problems;
    if (flux_offsets.empty()) problems.emplace_back("crossing data: no flux columns");
    if (probe_freqs.size() < 3) problems.emplace_back("crossing data: need >= 3 probe frequencies");
    if (amplitude.rows() != static_cast<Eigen::Index>(probe_freqs.size()) ||
        amplitude.cols() != static_cast<Eigen::Index>(flux_offsets.size())) {
        problems.push_back(fmt::format("crossing data: amplitude is {}x{}, expected {}x{}",
                                       amplitude.rows(), amplitude.cols(), probe_freqs.size(),
                                       flux_offsets.size()));
    }
    if (!amplitude.allFinite()) problems.emplace_back("crossing data: non-finite amplitude");
    for (std::size_t i = 1; i < probe_freqs.size(); ++i) {
        if (!(probe_freqs[i] > probe_freqs[i - 1])) {
            problems.emplace_back("crossing data: probe frequencies must be strictly ascending");
            break;
        }
    }
    if (!problems.empty()) throw ValidationError(std::move(problems));
}

namespace {

double vertex(double x0, double x1, double x2, double y0, double y1, double y2) {
    const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
    const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    return den != 0.0 ? x1 - 0.5 * num / den : x1;
}

}  // namespace

std::vector<ColumnPeaks> extract_peaks(const CrossingDataset& data, double min_ratio) {
    data.validate();
    const auto& f = data.probe_freqs;
    std::vector<ColumnPeaks> out;
    for (Eigen::Index c = 0; c < data.amplitude.cols(); ++c) {
        const auto col = data.amplitude.col(c);
        std::vector<std::pair<double, Eigen::Index>> maxima;
        for (Eigen::Index r = 1; r + 1 < col.size(); ++r) {
            if (col(r) > col(r - 1) && col(r) >= col(r + 1)) maxima.emplace_back(col(r), r);
        }
        if (maxima.size() < 2) continue;
        std::partial_sort(maxima.begin(), maxima.begin() + 2, maxima.end(),
                          [](const auto& a, const auto& b) { return a.first > b.first; });
        if (maxima[1].first < min_ratio * maxima[0].first) continue;
        double peaks[2];
        for (int k = 0; k < 2; ++k) {
            const Eigen::Index r = maxima[k].second;
            peaks[k] = vertex(f[r - 1], f[r], f[r + 1], col(r - 1), col(r), col(r + 1));
        }
        out.push_back({data.flux_offsets[c], std::max(peaks[0], peaks[1]),
                       std::min(peaks[0], peaks[1])});
    }
    return out;
}

CrossingFit fit_avoided_crossing(const CrossingDataset& data, double max_residual_rms) {
    const auto peaks = extract_peaks(data);
    if (peaks.size() < 5) {
        throw Error(ErrorKind::FitFailure,
                    fmt::format("avoided-crossing fit needs >= 5 columns with two peaks (got {})",
                                peaks.size()));
    }
    // Centre the flux axis for conditioning.
    double center = 0.0;
    for (const auto& p : peaks) center += p.flux;
    center /= static_cast<double>(peaks.size());

    // Bare lines join the upper branch on one end to the lower branch on the other.
    const auto& left = peaks.front();
    const auto& right = peaks.back();
    const double span = right.flux - left.flux;
    double min_gap = left.upper - left.lower;
    for (const auto& p : peaks) min_gap = std::min(min_gap, p.upper - p.lower);
    Eigen::VectorXd x0(5);
    const double a_slope = span != 0.0 ? (right.lower - left.upper) / span : 0.0;
    const double b_slope = span != 0.0 ? (right.upper - left.lower) / span : 0.0;
    x0 << left.upper + a_slope * (center - left.flux), a_slope,
          left.lower + b_slope * (center - left.flux), b_slope, std::max(min_gap, 1e-6);

    const int m = static_cast<int>(2 * peaks.size());
    ResidualFunction resid = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
        for (std::size_t k = 0; k < peaks.size(); ++k) {
            const double d = peaks[k].flux - center;
            const auto [hi, lo] = avoided_crossing_energies(x(0) + x(1) * d, x(2) + x(3) * d, x(4));
            r(2 * k) = peaks[k].upper - hi;
            r(2 * k + 1) = peaks[k].lower - lo;
        }
    };
    const auto lsq = levenberg_marquardt(resid, x0, m);

    CrossingFit fit;
    fit.columns_used = peaks.size();
    fit.residual_rms = lsq.rms;
    if (!(lsq.rms <= max_residual_rms)) {
        throw Error(ErrorKind::FitFailure,
                    fmt::format("avoided-crossing fit residual rms {} GHz exceeds {} GHz", lsq.rms,
                                max_residual_rms));
    }
    const Eigen::VectorXd& x = lsq.x;
    const bool first_is_ef = std::abs(x(1)) < std::abs(x(3));
    const int e = first_is_ef ? 0 : 2;
    const int s = first_is_ef ? 2 : 0;
    fit.ef_slope = x(e + 1);
    fit.s_slope = x(s + 1);
    fit.ef_intercept = x(e) - x(e + 1) * center;
    fit.s_intercept = x(s) - x(s + 1) * center;
    fit.g_rf = std::abs(x(4));
    fit.g_uncertainty = lsq.uncertainties(4);
    const double slope_diff = fit.ef_slope - fit.s_slope;
    if (slope_diff != 0.0) {
        fit.resonance_flux = (fit.s_intercept - fit.ef_intercept) / slope_diff;
        fit.resonance_freq = fit.ef_intercept + fit.ef_slope * fit.resonance_flux;
    } else {
        fit.resonance_flux = std::numeric_limits<double>::quiet_NaN();
        fit.resonance_freq = std::numeric_limits<double>::quiet_NaN();
    }
    return fit;
}

}  // namespace fluxinit
