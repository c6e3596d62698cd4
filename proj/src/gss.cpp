#include "sigexec/gss.hpp"

#include <cmath>
#include <limits>

#include "sigexec/detail/expsum.hpp"

namespace sigexec {

namespace {

using detail::ExpSum;

// (1 - e^{-g T}) / g without cancellation for small g*T.
double decay_integral(double g, double T) {
    return T * detail::expm1_over(-g * T);
}

// Density u(t) = B e^{-gamma t} + C of a StrategyMeasure as an ExpSum.
ExpSum density_sum(const StrategyMeasure& m) {
    ExpSum u;
    u.add(m.B, 0, -m.gamma, 0.0);
    u.add(m.C, 0, 0.0, 0.0);
    return u;
}

// Inventory X(t) = x0 + atom0 + C t + (B/gamma)(1 - e^{-gamma t}) on (0, T).
ExpSum inventory_sum(const StrategyMeasure& m) {
    ExpSum x;
    x.add(m.x0 + m.atom0 + m.B / m.gamma, 0, 0.0, 0.0);
    x.add(m.C, 1, 0.0, 0.0);
    x.add(-m.B / m.gamma, 0, -m.gamma, 0.0);
    return x;
}

// Integrated signal mean f(t) = (iota/gamma)(1 - e^{-gamma t}).
ExpSum signal_integral_sum(const OuSignal& sig) {
    ExpSum f;
    f.add(sig.iota / sig.gamma, 0, 0.0, 0.0);
    f.add(-sig.iota / sig.gamma, 0, -sig.gamma, 0.0);
    return f;
}

// Impact response J(t) = int_[0,T] G(|t-s|) dX_s of a measure with atoms
// (a0, aT) and density B e^{-g s} + C under the kernel kappa rho e^{-rho t}:
//
//   J(t) = kappa rho a0 e^{-rho t}
//        + B kappa rho [ (e^{-g t} - e^{-rho t}) / (rho - g)
//                      + (e^{-g t} - e^{rho(t-T) - g T}) / (rho + g) ]
//        + C kappa (1 - e^{-rho t}) + C kappa (1 - e^{rho(t-T)})
//        + kappa rho aT e^{rho(t-T)}.
//
// When g ~ rho the first bracket degenerates to t e^{-g t}; below the
// threshold it is represented that way directly (midpoint rate), which keeps
// products and integrals of J cancellation-free. The dropped correction is
// O(((rho-g) T)^2 / 24), far below evaluation tolerance at the threshold.
ExpSum impact_response_sum(const StrategyMeasure& m, const ExpKernel& ker) {
    const double g = m.gamma, rho = ker.rho, kr = ker.kappa * ker.rho;
    const double T = m.T;
    ExpSum J;
    J.add(kr * m.atom0, 0, -rho, 0.0);
    if (m.B != 0.0) {
        if (std::abs((rho - g) * T) < 1e-6) {
            const double mid = 0.5 * (rho + g);
            J.add(kr * m.B, 1, -mid, 0.0);
        } else {
            const double q = m.B / (rho - g);
            J.add(kr * q, 0, -g, 0.0);
            J.add(-kr * q, 0, -rho, 0.0);
        }
        const double r = m.B / (rho + g);
        J.add(kr * r, 0, -g, 0.0);
        J.add(-kr * r, 0, rho, -(rho + g) * T);
    }
    if (m.C != 0.0) {
        J.add(2.0 * ker.kappa * m.C, 0, 0.0, 0.0);
        J.add(-ker.kappa * m.C, 0, -rho, 0.0);
        J.add(-ker.kappa * m.C, 0, rho, -rho * T);
    }
    J.add(kr * m.atomT, 0, rho, -rho * T);
    return J;
}

void require_same_horizon(const GssProblem& p, const StrategyMeasure& m) {
    if (std::abs(p.T - m.T) > 1e-12 * std::max(1.0, p.T))
        throw config_error("strategy horizon " + std::to_string(m.T) +
                           " does not match problem horizon " + std::to_string(p.T));
}

}  // namespace

double StrategyMeasure::terminal_residual() const {
    return x0 + atom0 + B * decay_integral(gamma, T) + C * T + atomT;
}

void StrategyMeasure::validate() const {
    if (!(T > 0.0) || !std::isfinite(T))
        throw config_error("StrategyMeasure: T must be positive and finite");
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw config_error("StrategyMeasure: gamma must be positive and finite, got " +
                           std::to_string(gamma));
    for (double v : {atom0, B, C, atomT, x0})
        if (!std::isfinite(v)) throw config_error("StrategyMeasure: non-finite field");
    const double residual = terminal_residual();
    if (std::abs(residual) > 1e-8 * std::max(1.0, std::abs(x0)))
        throw config_error("StrategyMeasure: fuel constraint violated, residual " +
                           std::to_string(residual));
}

std::pair<GssConstants, StrategyMeasure> solve_closed_form(const GssProblem& p) {
    p.validate();
    if (p.phi != 0.0)
        throw config_error(
            "solve_closed_form: closed form requires phi == 0; "
            "use the discrete oracle for a running penalty (phi = " +
            std::to_string(p.phi) + ")");

    const double g = p.signal.gamma, rho = p.kernel.rho, kappa = p.kernel.kappa;
    const double iota = p.signal.iota, T = p.T, x = p.x0;
    const double eT = std::exp(-g * T);
    const double s = iota / (2.0 * kappa * rho * rho * g);  // recurring signal scale

    GssConstants c;
    c.B = s * (rho * rho - g * g);  // iota (rho^2 - g^2) / (2 kappa rho^2 g)
    c.A = (s * ((rho + g) * (1.0 + T * rho - (rho - g) * decay_integral(g, T)) -
                (rho - g) * eT) -
           x) /
          (2.0 + T * rho);
    c.C = rho * c.A - iota * (rho + g) / (2.0 * kappa * rho * g);
    c.D = c.A - s * ((rho + g) - (rho - g) * eT);
    c.lambda = 2.0 * kappa * c.C + iota / g;

    StrategyMeasure m;
    m.atom0 = c.A;
    m.B = c.B;
    m.C = c.C;
    m.gamma = g;
    m.atomT = c.D;
    m.x0 = x;
    m.T = T;

    const double residual = m.terminal_residual();
    if (!std::isfinite(residual) || std::abs(residual) > 1e-6 * std::max(1.0, x))
        throw numerical_error("solve_closed_form: constants violate the fuel constraint "
                              "(residual " + std::to_string(residual) + ")");
    return {c, m};
}

double inventory_at(const StrategyMeasure& m, double t) {
    if (t < 0.0) throw config_error("inventory_at: t must be non-negative, got " +
                                    std::to_string(t));
    if (t == 0.0) return m.x0;
    const double te = std::min(t, m.T);
    double x = m.x0 + m.atom0 + m.B * decay_integral(m.gamma, te) + m.C * te;
    if (t > m.T) x += m.atomT;
    return x;
}

double density_rate(const StrategyMeasure& m, double t) {
    return m.B * std::exp(-m.gamma * t) + m.C;
}

double impact_response_at(const GssProblem& p, const StrategyMeasure& m, double t) {
    require_same_horizon(p, m);
    return impact_response_sum(m, p.kernel).eval(t);
}

double cost(const GssProblem& p, const StrategyMeasure& m) {
    p.validate();
    m.validate();
    require_same_horizon(p, m);

    const ExpSum J = impact_response_sum(m, p.kernel);
    const ExpSum u = density_sum(m);
    const ExpSum f = signal_integral_sum(p.signal);

    const double impact = 0.5 * (m.atom0 * J.eval(0.0) + u.times(J).integral(m.T) +
                                 m.atomT * J.eval(m.T));
    const double signal = u.times(f).integral(m.T) + m.atomT * f.eval(m.T);

    double penalty = 0.0;
    if (p.phi != 0.0) {
        const ExpSum x = inventory_sum(m);
        penalty = p.phi * x.times(x).integral(m.T);
    }
    return impact + signal + penalty;
}

std::pair<double, double> check_optimality_condition(const GssProblem& p,
                                                     const StrategyMeasure& m,
                                                     const std::vector<double>& grid) {
    p.validate();
    m.validate();
    require_same_horizon(p, m);
    if (grid.empty())
        throw config_error("check_optimality_condition: grid must be non-empty");

    const ExpSum J = impact_response_sum(m, p.kernel);
    const ExpSum f = signal_integral_sum(p.signal);
    const ExpSum x = inventory_sum(m);

    std::vector<double> lhs(grid.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        if (t < 0.0 || t > m.T)
            throw config_error("check_optimality_condition: grid point outside [0, T]");
        lhs[i] = f.eval(t) + J.eval(t);
        if (p.phi != 0.0) lhs[i] -= 2.0 * p.phi * x.integral(t);
        mean += lhs[i];
    }
    mean /= static_cast<double>(grid.size());

    double max_dev = 0.0;
    for (double v : lhs) max_dev = std::max(max_dev, std::abs(v - mean));
    return {mean, max_dev};
}

double asymptotic_strategy(const GssProblem& p, double t) {
    p.validate();
    if (t < 0.0 || t > p.T)
        throw config_error("asymptotic_strategy: t must lie in [0, T], got " +
                           std::to_string(t));
    const double g = p.signal.gamma;
    const double scale = p.signal.iota / (2.0 * p.kernel.kappa * g * g);
    const double ramp = t / p.T;
    return p.x0 * (1.0 - ramp) +
           scale * (-std::expm1(-g * t) + ramp * std::expm1(-g * p.T));
}

MonotonicityReport monotonicity_diagnostic(const StrategyMeasure& m,
                                           const std::vector<double>& grid) {
    m.validate();
    if (grid.empty())
        throw config_error("monotonicity_diagnostic: grid must be non-empty");

    MonotonicityReport report;
    report.first_violation_time = std::numeric_limits<double>::quiet_NaN();
    const double tol = 1e-12 * std::max(1.0, std::abs(m.x0));

    // Walk the left-continuous values along the grid, then the two right
    // limits that the grid cannot see: just after 0 and just after T.
    double prev = inventory_at(m, 0.0);
    auto step = [&](double t, double value) {
        if (report.monotone && value > prev + tol) {
            report.monotone = false;
            report.first_violation_time = t;
        }
        prev = value;
    };
    step(0.0, m.x0 + m.atom0);  // right limit at 0
    for (double t : grid) {
        if (t < 0.0 || t > m.T)
            throw config_error("monotonicity_diagnostic: grid point outside [0, T]");
        if (t == 0.0) continue;
        step(t, inventory_at(m, t));
    }
    step(m.T, inventory_at(m, m.T));
    step(m.T, inventory_at(m, m.T) + m.atomT);  // right limit at T
    return report;
}

}  // namespace sigexec
