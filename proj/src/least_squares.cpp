#include "fluxinit/least_squares.hpp"

#include <cmath>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "fluxinit/errors.hpp"

namespace fluxinit {

namespace {

struct Functor {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    const ResidualFunction* f = nullptr;
    int n = 0;
    int m = 0;
    int inputs() const { return n; }
    int values() const { return m; }
    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
        (*f)(x, r);
        return r.allFinite() ? 0 : -1;
    }
};

}  // namespace

LeastSquaresResult levenberg_marquardt(const ResidualFunction& f, const Eigen::VectorXd& x0,
                                       int residual_count, const LeastSquaresOptions& opts) {
    if (residual_count < x0.size()) {
        throw Error(ErrorKind::DegenerateInput, "least squares: fewer residuals than parameters");
    }
    Functor functor;
    functor.f = &f;
    functor.n = static_cast<int>(x0.size());
    functor.m = residual_count;
    Eigen::NumericalDiff<Functor> diff(functor);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Functor>> lm(diff);
    lm.parameters.xtol = opts.xtol;
    lm.parameters.ftol = opts.ftol;
    lm.parameters.maxfev = opts.max_evaluations;

    LeastSquaresResult out;
    out.x = x0;
    const auto status = lm.minimize(out.x);
    out.evaluations = static_cast<int>(lm.nfev);
    out.converged = status == Eigen::LevenbergMarquardtSpace::RelativeReductionTooSmall ||
                    status == Eigen::LevenbergMarquardtSpace::RelativeErrorTooSmall ||
                    status == Eigen::LevenbergMarquardtSpace::RelativeErrorAndReductionTooSmall ||
                    status == Eigen::LevenbergMarquardtSpace::CosinusTooSmall ||
                    status == Eigen::LevenbergMarquardtSpace::FtolTooSmall ||
                    status == Eigen::LevenbergMarquardtSpace::XtolTooSmall ||
                    status == Eigen::LevenbergMarquardtSpace::GtolTooSmall;

    out.residuals.resize(residual_count);
    f(out.x, out.residuals);
    if (!out.residuals.allFinite()) {
        throw Error(ErrorKind::FitFailure, "least squares: non-finite residuals at the optimum");
    }
    out.rms = std::sqrt(out.residuals.squaredNorm() / residual_count);

    const int n = functor.n;
    out.uncertainties = Eigen::VectorXd::Zero(n);
    if (residual_count > n) {
        Eigen::MatrixXd jac(residual_count, n);
        diff.df(out.x, jac);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
        if (lu.isInvertible()) {
            const double s2 = out.residuals.squaredNorm() / (residual_count - n);
            out.covariance = s2 * lu.inverse();
            out.uncertainties = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
        }
    }
    return out;
}

}  // namespace fluxinit
