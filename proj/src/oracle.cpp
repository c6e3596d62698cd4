#include "sigexec/oracle.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>

#include "sigexec/common.hpp"
#include "sigexec/kernels.hpp"

namespace sigexec {

namespace {

void require_grid(const std::vector<double>& grid, double T) {
    if (grid.size() < 3) {
        throw config_error("oracle grid needs at least 3 nodes (N >= 2 intervals)");
    }
    if (std::abs(grid.front()) > 1e-12 * std::max(1.0, T) ||
        std::abs(grid.back() - T) > 1e-12 * std::max(1.0, T)) {
        std::ostringstream msg;
        msg << "oracle grid must span [0, " << T << "], got [" << grid.front()
            << ", " << grid.back() << "]";
        throw config_error(msg.str());
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw config_error("oracle grid must be strictly increasing");
        }
    }
}

// Trapezoid weights on the grid: w_0 = dt_1/2, w_j = (t_{j+1}-t_{j-1})/2,
// w_N = dt_N/2.
Eigen::VectorXd trapezoid_weights(const std::vector<double>& grid) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::VectorXd w(n);
    w(0) = 0.5 * (grid[1] - grid[0]);
    for (Eigen::Index j = 1; j + 1 < n; ++j) {
        w(j) = 0.5 * (grid[j + 1] - grid[j - 1]);
    }
    w(n - 1) = 0.5 * (grid[n - 1] - grid[n - 2]);
    return w;
}

// Suffix sums s_m = sum_{k >= m} w_k. Both the penalty quadratic form
// (L'WL)_{ij} = s_{max(i,j)} and the linear part (L'W1)_i = s_i reduce to
// these, since the cumulative-sum matrix L is lower-triangular ones.
Eigen::VectorXd suffix_sums(const Eigen::VectorXd& w) {
    Eigen::VectorXd s(w.size());
    double acc = 0.0;
    for (Eigen::Index m = w.size() - 1; m >= 0; --m) {
        acc += w(m);
        s(m) = acc;
    }
    return s;
}

}  // namespace

double GridStrategy::fuel_residual() const { return increments.sum() + x0; }

std::vector<double> GridStrategy::inventory_after() const {
    std::vector<double> inv(grid.size());
    double x = x0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        x += increments(static_cast<Eigen::Index>(j));
        inv[j] = x;
    }
    return inv;
}

void GridStrategy::validate() const {
    if (static_cast<std::size_t>(increments.size()) != grid.size()) {
        throw config_error("grid strategy: increments and grid sizes differ");
    }
    require_grid(grid, grid.back());
    const double res = fuel_residual();
    if (std::abs(res) > 1e-10 * std::max(1.0, std::abs(x0))) {
        std::ostringstream msg;
        msg << "grid strategy does not liquidate: residual " << res;
        throw config_error(msg.str());
    }
}

KktSystem build_qp(const GssProblem& p, int n_intervals) {
    if (n_intervals < 2) {
        throw config_error("build_qp needs at least 2 intervals");
    }
    std::vector<double> grid(static_cast<std::size_t>(n_intervals) + 1);
    for (int j = 0; j <= n_intervals; ++j) {
        grid[static_cast<std::size_t>(j)] = p.T * j / n_intervals;
    }
    grid.back() = p.T;
    return build_qp(p, grid);
}

KktSystem build_qp(const GssProblem& p, const std::vector<double>& grid) {
    p.validate();
    require_grid(grid, p.T);

    KktSystem sys;
    sys.grid = grid;
    sys.x0 = p.x0;
    sys.phi = p.phi;
    sys.H = gram_matrix(p.kernel, grid);

    const auto n = static_cast<Eigen::Index>(grid.size());
    sys.k.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        sys.k(i) = p.signal.integrated_conditional_mean(grid[static_cast<std::size_t>(i)]);
    }

    sys.k_penalty = Eigen::VectorXd::Zero(n);
    if (p.phi > 0.0) {
        const Eigen::VectorXd s = suffix_sums(trapezoid_weights(grid));
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                sys.H(i, j) += 2.0 * p.phi * s(std::max(i, j));
            }
        }
        sys.k_penalty = 2.0 * p.phi * p.x0 * s;
    }
    return sys;
}

QpSolution solve_qp(const KktSystem& sys) {
    const Eigen::Index n = sys.H.rows();
    const Eigen::VectorXd k_total = sys.k + sys.k_penalty;
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(n);

    Eigen::LLT<Eigen::MatrixXd> llt(sys.H);
    if (llt.info() != Eigen::Success) {
        throw numerical_error(
            "QP Hessian is not positive definite at this grid; the kernel "
            "Gram matrix lost definiteness");
    }

    // Schur complement on the single equality constraint:
    //   xi = -H^{-1}(k + lambda 1),  1' xi = -x0  =>  lambda from a scalar.
    const Eigen::VectorXd y = llt.solve(k_total);
    const Eigen::VectorXd z = llt.solve(one);
    const double ones_z = one.dot(z);
    double lambda = (sys.x0 - one.dot(y)) / ones_z;
    Eigen::VectorXd xi = -y - lambda * z;

    // One refinement pass mops up the rounding the Schur route introduces.
    {
        const Eigen::VectorXd r1 = -k_total - lambda * one - sys.H * xi;
        const double r2 = -sys.x0 - xi.sum();
        const Eigen::VectorXd hr = llt.solve(r1);
        const double dl = (one.dot(hr) - r2) / ones_z;
        xi += hr - dl * z;
        lambda += dl;
    }

    const double rhs_scale =
        std::sqrt(k_total.squaredNorm() + sys.x0 * sys.x0) + 1.0;
    const Eigen::VectorXd r1 = sys.H * xi + lambda * one + k_total;
    const double r2 = xi.sum() + sys.x0;
    const double residual =
        std::sqrt(r1.squaredNorm() + r2 * r2) / rhs_scale;
    if (!(residual < 1e-10)) {
        std::ostringstream msg;
        msg << "QP solve did not reach tolerance: relative residual "
            << residual;
        throw numerical_error(msg.str());
    }

    QpSolution sol;
    sol.strategy.grid = sys.grid;
    sol.strategy.increments = std::move(xi);
    sol.strategy.x0 = sys.x0;
    sol.lambda = lambda;
    sol.kkt_residual = residual;
    return sol;
}

double cost(const GssProblem& p, const GridStrategy& s) {
    p.validate();
    s.validate();

    const Eigen::MatrixXd g = gram_matrix(p.kernel, s.grid);
    const auto n = static_cast<Eigen::Index>(s.grid.size());
    Eigen::VectorXd k(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i) = p.signal.integrated_conditional_mean(s.grid[static_cast<std::size_t>(i)]);
    }

    double total = 0.5 * s.increments.dot(g * s.increments) + k.dot(s.increments);

    if (p.phi > 0.0) {
        const Eigen::VectorXd w = trapezoid_weights(s.grid);
        const std::vector<double> inv = s.inventory_after();
        double penalty = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double x = inv[static_cast<std::size_t>(j)];
            penalty += w(j) * x * x;
        }
        total += p.phi * penalty;
    }
    return total;
}

std::vector<ConvergenceRow> convergence_study(const GssProblem& p,
                                              const std::vector<int>& grid_sizes) {
    if (p.phi != 0.0) {
        throw config_error(
            "convergence_study compares against the closed form, which "
            "requires phi = 0");
    }
    const auto [c, m] = solve_closed_form(p);
    const double cost_ref = cost(p, m);
    const double lambda_ref = c.lambda;

    std::vector<ConvergenceRow> rows;
    rows.reserve(grid_sizes.size());
    for (int n : grid_sizes) {
        const QpSolution sol = solve_qp(build_qp(p, n));

        ConvergenceRow row;
        row.n = n;
        row.cost_gap = std::abs(cost(p, sol.strategy) - cost_ref) /
                       std::abs(cost_ref);
        row.lambda_gap = std::abs(-sol.lambda - lambda_ref) / std::abs(lambda_ref);

        // Post-trade inventory vs the closed form's right limits: x0 + A just
        // after the initial block, the continuous interior, 0 past T.
        const std::vector<double> inv = sol.strategy.inventory_after();
        double sup = std::abs(inv.front() - (p.x0 + c.A));
        for (std::size_t j = 1; j + 1 < inv.size(); ++j) {
            sup = std::max(sup, std::abs(inv[j] - inventory_at(m, sol.strategy.grid[j])));
        }
        sup = std::max(sup, std::abs(inv.back()));
        row.sup_gap = sup;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace sigexec
