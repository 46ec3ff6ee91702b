#pragma once

#include <functional>

#include <Eigen/Dense>

namespace fluxinit {

/// r = f(x); the residual vector is preallocated to the size passed to the solver.
using ResidualFunction = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r)>;

struct LeastSquaresOptions {
    double xtol = 1e-10;   // relative parameter step tolerance
    double ftol = 1e-12;
    int max_evaluations = 4000;
};

struct LeastSquaresResult {
    Eigen::VectorXd x;
    Eigen::VectorXd residuals;
    Eigen::MatrixXd covariance;    // s^2 (J^T J)^-1, empty when singular or m <= n
    Eigen::VectorXd uncertainties; // sqrt(diag(covariance)), zeros when unavailable
    double rms = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Levenberg-Marquardt with forward-difference Jacobian (Eigen unsupported module).
LeastSquaresResult levenberg_marquardt(const ResidualFunction& f, const Eigen::VectorXd& x0,
                                       int residual_count, const LeastSquaresOptions& opts = {});

}  // namespace fluxinit
