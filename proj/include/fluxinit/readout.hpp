#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace fluxinit {

using IQPoint = std::complex<double>;

/// Single-shot IQ points, one cloud per prepared state. The first set is
/// ground-prepared and decides which fitted component is r_g.
struct IQShotSet {
    std::vector<std::string> labels;
    std::vector<std::vector<IQPoint>> shots;

    std::size_t total() const;
    void validate(std::size_t min_shots = 100) const;
};

struct IQFit {
    IQPoint r_g;
    IQPoint r_e;
    double sigma = 0.0;
    double weight_g = 0.0;  // pooled mixture weights
    double weight_e = 0.0;
    /// Per prepared set: (ground, excited) fractions from a weight-only fit with the shared centres.
    std::vector<std::pair<double, double>> set_weights;
    double log_likelihood_gain = 0.0;  // two components over one isotropic Gaussian
    int iterations = 0;
    bool low_fidelity = false;  // |r_g - r_e| < sigma
    bool degenerate = false;    // second component not supported by the data
};

/// Two isotropic Gaussians with shared sigma fitted by expectation-maximization
/// on the pooled shots (at least 200). Centres start at the 10th and 90th
/// percentiles of the projection on the principal axis.
IQFit fit_iq_double_gaussian(const IQShotSet& shots);

struct MetrologyInput {
    double rabi_contrast = 0.0;  // |r_rabi|; ignored when <= 0
    IQPoint r_g;
    IQPoint r_e;
    std::optional<IQPoint> mean_g;  // <r_g>, mean of ground-prepared shots after init
    std::optional<IQPoint> mean_e;  // <r_e>
    std::optional<IQPoint> r_f;     // enables the P_f term
};

struct MetrologyResult {
    double e_i = 0.0;          // from the mean centres when available, else from the contrast
    double e_i_contrast = 0.0; // (1 - r_rabi / |r_g - r_e|) / 2
    double e_down = 0.0;
    double p_e = 0.0;
    double p_f = 0.0;
    double r_rabi = 0.0;
    bool has_centres = false;
};

/// e_i = (1 - r_rabi/|r_g - r_e|)/2 and, with mean centres,
///   <r_g> = (1 - e_i) r_g + P_e r_e + P_f r_f,
///   <r_e> = (P_e + e_down) r_g + (1 - e_i - e_down) r_e + P_f r_f,   e_i = P_e + P_f,
/// solved for (P_e, P_f, e_down) by linear least squares (P_f = 0 without r_f).
MetrologyResult initialization_error_metrology(const MetrologyInput& in);

/// Re[(<r_g> - <r_e>) / (r_g - r_e)] + e_down, the lower bound on 1 - P_f.
double leakage_removal_bound(IQPoint mean_g, IQPoint mean_e, IQPoint r_g, IQPoint r_e,
                             double e_down);

}  // namespace fluxinit
