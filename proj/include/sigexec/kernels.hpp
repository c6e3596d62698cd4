#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "sigexec/common.hpp"

namespace sigexec {

// Transient impact kernel G(t) = kappa * rho * e^{-rho t}: a trade moves the
// price by kappa*rho per unit traded and the displacement relaxes at rate rho.
// Total displacement from strategy X is int_0^t G(t-s) dX_s.
struct ExpKernel {
    double kappa = 1.0;  // permanent scale, > 0
    double rho = 1.0;    // relaxation rate, > 0

    void validate() const {
        if (!(kappa > 0.0) || !std::isfinite(kappa))
            throw config_error("ExpKernel: kappa must be positive and finite, got " +
                               std::to_string(kappa));
        if (!(rho > 0.0) || !std::isfinite(rho))
            throw config_error("ExpKernel: rho must be positive and finite, got " +
                               std::to_string(rho));
    }

    double operator()(double t) const { return kappa * rho * std::exp(-rho * t); }
};

// Degenerate rho -> infinity counterpart: impact kappa * delta_0, i.e. purely
// instantaneous cost kappa * rate^2 per unit time. Used by the feedback-control
// framework, where only kappa survives.
struct InstantKernel {
    double kappa = 1.0;  // > 0

    void validate() const {
        if (!(kappa > 0.0) || !std::isfinite(kappa))
            throw config_error("InstantKernel: kappa must be positive and finite, got " +
                               std::to_string(kappa));
    }
};

// Gram matrix M_ij = G(|t_i - t_j|) on a grid of trade times. Symmetric and,
// for the exponential kernel on distinct times, strictly positive definite
// (Bochner: e^{-rho|t|} has a Cauchy spectral density > 0), which is what
// makes the discrete cost a strictly convex QP.
Eigen::MatrixXd gram_matrix(const ExpKernel& kernel, const std::vector<double>& grid);

// True iff `m` is symmetric and its Cholesky factorization succeeds with every
// pivot above tol_rel * max diagonal entry. Throws config_error on an
// asymmetric input rather than silently symmetrizing it.
bool is_positive_definite(const Eigen::MatrixXd& m, double tol_rel = 1e-10);

}  // namespace sigexec
