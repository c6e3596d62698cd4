#pragma once

#include <utility>
#include <vector>

#include "sigexec/common.hpp"
#include "sigexec/kernels.hpp"
#include "sigexec/signals.hpp"

namespace sigexec {

// Optimal liquidation of x0 > 0 shares over [0, T] under the transient
// exponential impact kernel and the OU drift signal, with an optional running
// inventory penalty phi. The strategy is a signed measure on [0, T]: block
// trades may occur at 0 and T, continuous trading in between, and the whole
// position must be gone immediately after T (fuel constraint).
struct GssProblem {
    double x0 = 1.0;     // initial inventory, > 0
    double T = 1.0;      // horizon, > 0
    OuSignal signal;
    ExpKernel kernel;
    double phi = 0.0;    // running inventory penalty, >= 0

    void validate() const {
        if (!(x0 > 0.0) || !std::isfinite(x0))
            throw config_error("GssProblem: x0 must be positive and finite, got " +
                               std::to_string(x0));
        if (!(T > 0.0) || !std::isfinite(T))
            throw config_error("GssProblem: T must be positive and finite, got " +
                               std::to_string(T));
        if (!(phi >= 0.0) || !std::isfinite(phi))
            throw config_error("GssProblem: phi must be non-negative and finite, got " +
                               std::to_string(phi));
        signal.validate();
        kernel.validate();
    }
};

// Constants of the optimal measure dX = A delta_0 + (B e^{-gamma t} + C) dt
// + D delta_T, plus the Lagrange multiplier of the fuel constraint.
struct GssConstants {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    double D = 0.0;
    double lambda = 0.0;
};

// A (not necessarily optimal) strategy of the same form: atoms at the ends,
// density u(t) = B e^{-gamma t} + C in between. `gamma` is the decay rate of
// the density, normally inherited from the signal.
struct StrategyMeasure {
    double atom0 = 0.0;
    double B = 0.0;
    double C = 0.0;
    double gamma = 1.0;
    double atomT = 0.0;
    double x0 = 0.0;
    double T = 1.0;

    // Inventory remaining right after T; zero for admissible strategies.
    double terminal_residual() const;

    void validate() const;
};

// Solves the variational problem in closed form. Requires phi == 0 (the
// analytic solution covers only the pure fuel-constrained case; use the
// discrete QP for phi > 0). Handles gamma == rho, where the exponential part
// of the density degenerates to zero.
std::pair<GssConstants, StrategyMeasure> solve_closed_form(const GssProblem& p);

// Left-continuous inventory X(t): atoms at 0 and T are included only for
// times strictly beyond them, so inventory_at(m, 0) == x0 and
// inventory_at(m, t) for t > T is the post-final-trade residual.
double inventory_at(const StrategyMeasure& m, double t);

// Trading-rate density u(t) = B e^{-gamma t} + C on (0, T).
double density_rate(const StrategyMeasure& m, double t);

// Expected execution cost of the strategy:
//   int f dX + 1/2 double-int G(|t-s|) dX dX + phi int_0^T X^2 dt,
// with f the integrated signal mean. The double integral is taken in the
// measure-theoretic sense, so each atom dx contributes G(0) dx^2 / 2.
// All pieces are evaluated analytically (exponential-polynomial integrals).
double cost(const GssProblem& p, const StrategyMeasure& m);

// Kernel response int_0^T G(|t-s|) dX_s of the strategy at time t.
double impact_response_at(const GssProblem& p, const StrategyMeasure& m, double t);

// Evaluates the first-order condition
//   LHS(t) = int_0^t E[I_s] ds + int G(|t-s|) dX_s - 2 phi int_0^t X ds
// on the grid. For the optimizer LHS is constant (the fuel multiplier).
// Returns {mean LHS over the grid, max |LHS - mean|}.
std::pair<double, double> check_optimality_condition(const GssProblem& p,
                                                     const StrategyMeasure& m,
                                                     const std::vector<double>& grid);

// Inventory path in the rho -> infinity (instantaneous impact) limit:
//   X(t) = x0 (1 - t/T)
//        + iota/(2 kappa gamma^2) [(1 - e^{-gamma t}) - (t/T)(1 - e^{-gamma T})].
// This is the limit of the closed-form solution: the block trades vanish and
// the signal-driven tilt rides on top of a TWAP that burns the inventory.
// Satisfies X(0) = x0, X(T) = 0 for every iota.
double asymptotic_strategy(const GssProblem& p, double t);

struct MonotonicityReport {
    bool monotone = true;
    // First grid time at which inventory increases; NaN when monotone.
    double first_violation_time = 0.0;
};

// Checks whether inventory is non-increasing along `grid` (selling only,
// never buying back). The initial block and the final block are included via
// the right limits at 0 and T.
MonotonicityReport monotonicity_diagnostic(const StrategyMeasure& m,
                                           const std::vector<double>& grid);

}  // namespace sigexec
