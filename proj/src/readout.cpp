#include "fluxinit/readout.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "fluxinit/errors.hpp"

namespace fluxinit {

std::size_t IQShotSet::total() const {
    std::size_t n = 0;
    for (const auto& s : shots) n += s.size();
    return n;
}

void IQShotSet::validate(std::size_t min_shots) const {
    std::vector<std::string> problems;
    if (shots.empty()) problems.emplace_back("IQ shots: no prepared states");
    if (!labels.empty() && labels.size() != shots.size()) {
        problems.emplace_back("IQ shots: label count differs from set count");
    }
    for (std::size_t i = 0; i < shots.size(); ++i) {
        if (shots[i].size() < min_shots) {
            problems.push_back(
                fmt::format("IQ shots: set {} has {} shots (< {})", i, shots[i].size(), min_shots));
        }
        for (const auto& p : shots[i]) {
            if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) {
                problems.push_back(fmt::format("IQ shots: set {} has non-finite points", i));
                break;
            }
        }
    }
    if (!problems.empty()) throw ValidationError(std::move(problems));
}

namespace {

double quantile(std::vector<double> v, double q) {
    const auto k = static_cast<std::size_t>(q * static_cast<double>(v.size() - 1));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

}  // namespace

IQFit fit_iq_double_gaussian(const IQShotSet& shots) {
    shots.validate(1);
    const std::size_t n = shots.total();
    if (n < 200) {
        throw Error(ErrorKind::ParameterDomain,
                    fmt::format("IQ fit needs >= 200 shots (got {})", n));
    }
    std::vector<IQPoint> pts;
    pts.reserve(n);
    for (const auto& s : shots.shots) pts.insert(pts.end(), s.begin(), s.end());
    const double nd = static_cast<double>(n);

    IQPoint mean = 0.0;
    for (const auto& p : pts) mean += p;
    mean /= nd;
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : pts) {
        const Eigen::Vector2d d(p.real() - mean.real(), p.imag() - mean.imag());
        cov += d * d.transpose();
    }
    cov /= nd;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov);
    const Eigen::Vector2d axis = eig.eigenvectors().col(1);
    const IQPoint u(axis(0), axis(1));

    // Single isotropic Gaussian reference likelihood.
    const double var1 = std::max(0.5 * cov.trace(), 1e-300);
    const double ll_single = -nd * (std::log(2.0 * std::numbers::pi * var1) + 1.0);

    std::vector<double> proj(n);
    for (std::size_t k = 0; k < n; ++k) {
        const IQPoint d = pts[k] - mean;
        proj[k] = d.real() * u.real() + d.imag() * u.imag();
    }
    IQPoint c[2] = {mean + quantile(proj, 0.1) * u, mean + quantile(proj, 0.9) * u};
    double w[2] = {0.5, 0.5};
    double var = std::max(eig.eigenvalues()(0), 1e-12 * std::max(1.0, var1));

    IQFit fit;
    std::vector<double> resp(n);  // responsibility of component 0
    double ll = -std::numeric_limits<double>::infinity();
    for (int it = 1; it <= 2000; ++it) {
        // E-step in log space.
        double ll_new = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double l0 = std::log(std::max(w[0], 1e-300)) - std::norm(pts[k] - c[0]) / (2.0 * var);
            const double l1 = std::log(std::max(w[1], 1e-300)) - std::norm(pts[k] - c[1]) / (2.0 * var);
            const double m = std::max(l0, l1);
            const double s = std::exp(l0 - m) + std::exp(l1 - m);
            resp[k] = std::exp(l0 - m) / s;
            ll_new += m + std::log(s) - std::log(2.0 * std::numbers::pi * var);
        }
        // M-step.
        double n0 = 0.0;
        IQPoint s0 = 0.0, s1 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            n0 += resp[k];
            s0 += resp[k] * pts[k];
            s1 += (1.0 - resp[k]) * pts[k];
        }
        const double n1 = nd - n0;
        if (n0 > 0.0) c[0] = s0 / n0;
        if (n1 > 0.0) c[1] = s1 / n1;
        w[0] = n0 / nd;
        w[1] = n1 / nd;
        double ss = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            ss += resp[k] * std::norm(pts[k] - c[0]) + (1.0 - resp[k]) * std::norm(pts[k] - c[1]);
        }
        var = std::max(ss / (2.0 * nd), 1e-300);
        fit.iterations = it;
        if (std::abs(ll_new - ll) <= 1e-10 * std::max(1.0, std::abs(ll_new))) {
            ll = ll_new;
            break;
        }
        ll = ll_new;
    }

    // Component 0 is ground if it holds the majority of the ground-prepared shots.
    const std::size_t n_first = shots.shots.front().size();
    double first0 = 0.0;
    for (std::size_t k = 0; k < n_first; ++k) first0 += resp[k];
    const bool swap = first0 < 0.5 * static_cast<double>(n_first);
    const int g = swap ? 1 : 0;
    fit.r_g = c[g];
    fit.r_e = c[1 - g];
    fit.weight_g = w[g];
    fit.weight_e = w[1 - g];
    fit.sigma = std::sqrt(var);
    // Per-set weights by weight-only EM with the shared centres and width; the
    // pooled weights would act as a biased prior for sets far from the pooled mix.
    for (const auto& s : shots.shots) {
        double frac0 = 0.5;
        if (!s.empty()) {
            std::vector<double> lr(s.size());  // log likelihood ratio, component 0 over 1
            for (std::size_t k = 0; k < s.size(); ++k) {
                lr[k] = (std::norm(s[k] - c[1]) - std::norm(s[k] - c[0])) / (2.0 * var);
            }
            for (int it = 0; it < 10000; ++it) {
                const double prior = std::log(frac0) - std::log1p(-frac0);
                double acc = 0.0;
                for (double x : lr) acc += 1.0 / (1.0 + std::exp(-(x + prior)));
                const double next = std::clamp(acc / static_cast<double>(s.size()), 1e-12, 1.0 - 1e-12);
                const bool done = std::abs(next - frac0) < 1e-12;
                frac0 = next;
                if (done) break;
            }
        }
        fit.set_weights.emplace_back(swap ? 1.0 - frac0 : frac0, swap ? frac0 : 1.0 - frac0);
    }
    fit.log_likelihood_gain = ll - ll_single;
    fit.low_fidelity = std::abs(fit.r_g - fit.r_e) < fit.sigma;
    // Three extra parameters; require a BIC-style gain well above the penalty.
    fit.degenerate = fit.log_likelihood_gain < 3.0 * std::log(nd) || std::min(w[0], w[1]) < 1e-4;
    return fit;
}

MetrologyResult initialization_error_metrology(const MetrologyInput& in) {
    const IQPoint diff = in.r_g - in.r_e;
    const double sep = std::abs(diff);
    if (!(sep > 0.0)) {
        throw Error(ErrorKind::DegenerateInput, "metrology: r_g and r_e coincide");
    }
    MetrologyResult res;
    if (in.rabi_contrast > 0.0) {
        if (in.rabi_contrast > sep * (1.0 + 1e-12)) {
            throw Error(ErrorKind::ParameterDomain,
                        fmt::format("metrology: Rabi contrast {} exceeds |r_g - r_e| = {}",
                                    in.rabi_contrast, sep));
        }
        res.r_rabi = in.rabi_contrast;
        res.e_i_contrast = 0.5 * (1.0 - in.rabi_contrast / sep);
        res.e_i = res.e_i_contrast;
        res.p_e = res.e_i;
    }
    if (in.mean_g && in.mean_e) {
        res.has_centres = true;
        // Unknowns (P_e, P_f, e_down); four real equations from the two complex ones.
        const IQPoint rf = in.r_f.value_or(in.r_g);
        const int unknowns = in.r_f ? 3 : 2;
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4, unknowns);
        Eigen::Vector4d b;
        const IQPoint lhs_g = *in.mean_g - in.r_g;
        const IQPoint lhs_e = *in.mean_e - in.r_e;
        const IQPoint eg = in.r_e - in.r_g;
        const IQPoint ge = in.r_g - in.r_e;
        // <r_g> - r_g = P_e (r_e - r_g) + P_f (r_f - r_g)
        a(0, 0) = eg.real();
        a(1, 0) = eg.imag();
        // <r_e> - r_e = (P_e + e_down)(r_g - r_e) + P_f (r_f - r_e)
        a(2, 0) = ge.real();
        a(3, 0) = ge.imag();
        a(2, 1) = ge.real();
        a(3, 1) = ge.imag();
        if (in.r_f) {
            const IQPoint fg = rf - in.r_g;
            const IQPoint fe = rf - in.r_e;
            a(0, 2) = fg.real();
            a(1, 2) = fg.imag();
            a(2, 2) = fe.real();
            a(3, 2) = fe.imag();
        }
        b << lhs_g.real(), lhs_g.imag(), lhs_e.real(), lhs_e.imag();
        const Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
        res.p_e = x(0);
        res.e_down = x(1);
        res.p_f = in.r_f ? x(2) : 0.0;
        res.e_i = res.p_e + res.p_f;
    }
    return res;
}

double leakage_removal_bound(IQPoint mean_g, IQPoint mean_e, IQPoint r_g, IQPoint r_e,
                             double e_down) {
    const IQPoint diff = r_g - r_e;
    if (!(std::abs(diff) > 0.0)) {
        throw Error(ErrorKind::DegenerateInput, "leakage bound: r_g and r_e coincide");
    }
    return ((mean_g - mean_e) / diff).real() + e_down;
}

}  // namespace fluxinit
