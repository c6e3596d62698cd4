#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sigexec/gss.hpp"

namespace sigexec {

// Discretized strategy: a trade xi_i at every grid node. Increments sum to
// -x0, so the position is flat after the last trade. Endpoint increments play
// the role of the closed form's block trades; interior increments approximate
// density times local spacing.
struct GridStrategy {
    std::vector<double> grid;       // N+1 times, 0 = t_0 < ... < t_N = T
    Eigen::VectorXd increments;     // xi, one trade per node
    double x0 = 0.0;

    // sum(xi) + x0; zero for feasible strategies.
    double fuel_residual() const;

    // Post-trade inventory at each node: X_j = x0 + sum_{i<=j} xi_i.
    std::vector<double> inventory_after() const;

    void validate() const;
};

// The equality-constrained QP  min 1/2 xi' H xi + (k + k_penalty)' xi
// s.t. 1' xi = -x0, assembled from a problem and a grid:
//   H         = gram + 2 phi Q, Q the trapezoid quadratic form of the
//               squared cumulative inventory,
//   k         = integrated signal mean at the nodes,
//   k_penalty = 2 phi x0 L' W 1, the linear part the running penalty picks up
//               from the x0 offset inside the inventory.
// Stationarity reads H xi + k + k_penalty + lambda 1 = 0, which is the
// discrete first-order condition; note the discrete multiplier carries the
// opposite sign of the continuous condition constant (lambda_cont = -lambda
// when phi = 0).
struct KktSystem {
    Eigen::MatrixXd H;
    Eigen::VectorXd k;
    Eigen::VectorXd k_penalty;
    std::vector<double> grid;
    double x0 = 0.0;
    double phi = 0.0;

    Eigen::VectorXd ones() const { return Eigen::VectorXd::Ones(H.rows()); }
    double constraint_rhs() const { return -x0; }
};

// Assembles the QP on a uniform grid with N intervals (N >= 2), or on an
// explicit strictly increasing grid spanning [0, T].
KktSystem build_qp(const GssProblem& p, int n_intervals);
KktSystem build_qp(const GssProblem& p, const std::vector<double>& grid);

struct QpSolution {
    GridStrategy strategy;
    double lambda = 0.0;        // discrete multiplier of the bordered system
    double kkt_residual = 0.0;  // relative residual of the solved system
};

// Exact solve of [H 1; 1' 0][xi; lambda] = [-(k + k_penalty); -x0] via
// Cholesky and the Schur complement, with one iterative-refinement pass.
// Throws numerical_error if H is not positive definite at this grid or the
// residual exceeds 1e-10 relative.
QpSolution solve_qp(const KktSystem& sys);

// Discrete execution cost of a grid strategy under the same convention as the
// QP objective: 1/2 xi' G xi + k' xi + phi * trapz(X^2). Directly comparable
// with cost(p, StrategyMeasure) as the grid refines.
double cost(const GssProblem& p, const GridStrategy& s);

struct ConvergenceRow {
    int n = 0;
    double cost_gap = 0.0;    // relative to the closed-form cost
    double sup_gap = 0.0;     // absolute sup over nodes of |X_grid - X_closed|
    double lambda_gap = 0.0;  // relative, after the sign mapping
};

// Refinement study against the closed form (phi must be 0): for each N,
// solves the QP and reports how fast cost, trajectory, and multiplier
// approach their continuous counterparts.
std::vector<ConvergenceRow> convergence_study(const GssProblem& p,
                                              const std::vector<int>& grid_sizes);

}  // namespace sigexec
