#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

#include "sigexec/gss.hpp"
#include "sigexec/rng.hpp"

using namespace sigexec;
using boost::math::quadrature::gauss_kronrod;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
    return g;
}

GssProblem reference_problem(double iota) {
    GssProblem p;
    p.x0 = 10.0;
    p.T = 10.0;
    p.signal = OuSignal{0.9, 0.0, iota};
    p.kernel = ExpKernel{0.1, 1.0};
    return p;
}

// Independent route to the constants: the first-order condition
// f(t) + J(t) = lambda on [0, T] expanded in the basis
// {e^{-rho t}, e^{-gamma t}, e^{rho(t-T)}, 1} plus the fuel constraint gives a
// 4x4 linear system in (A, B, C, D). Solving it numerically shares no code
// with the closed-form expressions.
GssConstants constants_from_linear_system(const GssProblem& p) {
    const double g = p.signal.gamma, rho = p.kernel.rho, k = p.kernel.kappa;
    const double T = p.T, iota = p.signal.iota;
    REQUIRE(std::abs(rho - g) > 1e-6);  // system form assumes distinct rates
    Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
    Eigen::Vector4d rhs;
    // e^{-gamma t} coefficient
    M(0, 1) = k * rho * (1.0 / (rho - g) + 1.0 / (rho + g));
    rhs(0) = iota / g;
    // e^{-rho t} coefficient
    M(1, 0) = k * rho;
    M(1, 1) = -k * rho / (rho - g);
    M(1, 2) = -k;
    rhs(1) = 0.0;
    // e^{rho(t-T)} coefficient
    M(2, 1) = -k * rho * std::exp(-g * T) / (rho + g);
    M(2, 2) = -k;
    M(2, 3) = k * rho;
    rhs(2) = 0.0;
    // fuel constraint
    M(3, 0) = 1.0;
    M(3, 1) = (1.0 - std::exp(-g * T)) / g;
    M(3, 2) = T;
    M(3, 3) = 1.0;
    rhs(3) = -p.x0;
    const Eigen::Vector4d sol = M.fullPivLu().solve(rhs);
    GssConstants c;
    c.A = sol(0);
    c.B = sol(1);
    c.C = sol(2);
    c.D = sol(3);
    c.lambda = 2.0 * k * sol(2) + iota / g;
    return c;
}

// Brute-force impact response via adaptive quadrature, splitting at the kink.
double impact_response_numeric(const GssProblem& p, const StrategyMeasure& m, double t) {
    const auto& ker = p.kernel;
    const auto G = [&](double u) { return ker(std::abs(u)); };
    const auto integrand = [&](double s) { return density_rate(m, s) * G(t - s); };
    double val = m.atom0 * G(t) + m.atomT * G(m.T - t);
    if (t > 0.0)
        val += gauss_kronrod<double, 15>::integrate(integrand, 0.0, std::min(t, m.T), 12, 1e-13);
    if (t < m.T)
        val += gauss_kronrod<double, 15>::integrate(integrand, std::min(t, m.T), m.T, 12, 1e-13);
    return val;
}

// Brute-force total cost for cross-checking the analytic path.
double cost_numeric(const GssProblem& p, const StrategyMeasure& m) {
    const auto J = [&](double t) { return impact_response_numeric(p, m, t); };
    const auto f = [&](double t) { return p.signal.integrated_conditional_mean(t); };
    const double impact =
        0.5 * (m.atom0 * J(0.0) +
               gauss_kronrod<double, 15>::integrate(
                   [&](double t) { return density_rate(m, t) * J(t); }, 0.0, m.T, 10, 1e-11) +
               m.atomT * J(m.T));
    const double signal =
        gauss_kronrod<double, 15>::integrate(
            [&](double t) { return density_rate(m, t) * f(t); }, 0.0, m.T, 10, 1e-12) +
        m.atomT * f(m.T);
    double penalty = 0.0;
    if (p.phi != 0.0)
        penalty = p.phi * gauss_kronrod<double, 15>::integrate(
                              [&](double t) {
                                  const double x = inventory_at(m, t);
                                  return x * x;
                              },
                              0.0, m.T, 10, 1e-12);
    return impact + signal + penalty;
}

}  // namespace

TEST_CASE("no-signal case collapses to the classic block-rate-block solution") {
    auto p = reference_problem(0.0);
    const auto [c, m] = solve_closed_form(p);
    // A = C = D = -x0 / (2 + rho T) = -10/12, B = 0, lambda = 2 kappa C
    const double expected = -10.0 / 12.0;
    CHECK(c.A == doctest::Approx(expected).epsilon(1e-14));
    CHECK(c.C == doctest::Approx(expected).epsilon(1e-14));
    CHECK(c.D == doctest::Approx(expected).epsilon(1e-14));
    CHECK(std::abs(c.B) < 1e-15);
    CHECK(c.lambda == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
    CHECK(m.atom0 == c.A);
    CHECK(m.atomT == c.D);
}

TEST_CASE("closed-form constants agree with an independent linear-system solve") {
    struct Params {
        double g, rho, kappa, T, x0, iota;
    };
    const std::vector<Params> cases = {
        {0.9, 1.0, 0.1, 10.0, 10.0, -0.5}, {0.9, 1.0, 0.1, 10.0, 10.0, 0.5},
        {0.5, 2.0, 0.3, 5.0, 7.0, 1.3},    {2.0, 0.4, 1.0, 2.0, 3.0, -2.0},
        {0.05, 3.0, 0.02, 20.0, 50.0, 0.1}, {1.7, 1.5, 0.6, 1.0, 1.0, 0.9},
    };
    for (const auto& prm : cases) {
        CAPTURE(prm.g);
        CAPTURE(prm.rho);
        CAPTURE(prm.iota);
        GssProblem p;
        p.x0 = prm.x0;
        p.T = prm.T;
        p.signal = OuSignal{prm.g, 0.0, prm.iota};
        p.kernel = ExpKernel{prm.kappa, prm.rho};
        const auto [c, m] = solve_closed_form(p);
        const auto ref = constants_from_linear_system(p);
        CHECK(c.A == doctest::Approx(ref.A).epsilon(1e-10));
        CHECK(c.B == doctest::Approx(ref.B).epsilon(1e-10));
        CHECK(c.C == doctest::Approx(ref.C).epsilon(1e-10));
        CHECK(c.D == doctest::Approx(ref.D).epsilon(1e-10));
        CHECK(c.lambda == doctest::Approx(ref.lambda).epsilon(1e-10));
        CHECK(std::abs(m.terminal_residual()) < 1e-10 * prm.x0);
    }
}

TEST_CASE("selling into a falling signal front-loads a sell block") {
    const auto [c, m] = solve_closed_form(reference_problem(-0.5));
    CHECK(c.A == doctest::Approx(-5.6224).epsilon(1e-3));
    CHECK(c.A < -0.8334);  // much larger than the no-signal block -10/12
    CHECK(c.lambda == doctest::Approx(2.0 * 0.1 * c.C - 0.5 / 0.9).epsilon(1e-14));
    const auto mono = monotonicity_diagnostic(m, linspace(0.0, 10.0, 401));
    CHECK(mono.monotone);
}

TEST_CASE("a rising signal makes the strategy buy first, breaking monotonicity") {
    const auto [c, m] = solve_closed_form(reference_problem(0.5));
    CHECK(c.A > 0.0);  // initial block is a purchase
    const auto mono = monotonicity_diagnostic(m, linspace(0.0, 10.0, 401));
    CHECK_FALSE(mono.monotone);
    CHECK(mono.first_violation_time == doctest::Approx(0.0));
}

TEST_CASE("first-order condition is flat exactly at the solution") {
    const auto grid = linspace(0.0, 10.0, 1001);
    for (double iota : {-0.5, -0.25, 0.0, 0.25, 0.5}) {
        auto p = reference_problem(iota);
        const auto [c, m] = solve_closed_form(p);
        const auto [lambda_est, max_dev] = check_optimality_condition(p, m, grid);
        CAPTURE(iota);
        CHECK(max_dev < 1e-10 * std::max(1.0, std::abs(lambda_est)));
        CHECK(lambda_est == doctest::Approx(c.lambda).epsilon(1e-10));
    }
    // a uniform-rate strategy is far from optimal: the condition slopes
    auto p = reference_problem(-0.5);
    StrategyMeasure twap;
    twap.B = 0.0;
    twap.C = -1.0;
    twap.gamma = p.signal.gamma;
    twap.x0 = 10.0;
    twap.T = 10.0;
    const auto [lambda_t, dev_t] = check_optimality_condition(p, twap, grid);
    (void)lambda_t;
    CHECK(dev_t > 1e-3);
}

TEST_CASE("degenerate gamma == rho keeps everything finite and flat") {
    GssProblem p;
    p.x0 = 10.0;
    p.T = 10.0;
    p.signal = OuSignal{1.0, 0.0, 0.5};
    p.kernel = ExpKernel{0.1, 1.0};
    const auto [c, m] = solve_closed_form(p);
    CHECK(c.B == 0.0);  // exponential density term vanishes identically
    CHECK(std::abs(m.terminal_residual()) < 1e-12 * p.x0);
    const auto grid = linspace(0.0, 10.0, 501);
    const auto [lambda_est, max_dev] = check_optimality_condition(p, m, grid);
    CHECK(lambda_est == doctest::Approx(c.lambda).epsilon(1e-12));
    CHECK(max_dev < 1e-10);

    // continuity across the crossing: nearby gamma give nearby paths
    for (double bump : {1.0 - 1e-9, 1.0 + 1e-9}) {
        auto q = p;
        q.signal.gamma = bump;
        const auto [c2, m2] = solve_closed_form(q);
        (void)c2;
        for (double t : linspace(0.0, 10.0, 21))
            CHECK(std::abs(inventory_at(m2, t) - inventory_at(m, t)) < 1e-6);
    }
}

TEST_CASE("inventory honors the atoms only beyond their times") {
    const auto [c, m] = solve_closed_form(reference_problem(-0.5));
    CHECK(inventory_at(m, 0.0) == 10.0);
    // right after 0 the block has executed
    CHECK(inventory_at(m, 1e-12) == doctest::Approx(10.0 + c.A).epsilon(1e-9));
    // left limit at T still carries the final block
    CHECK(inventory_at(m, 10.0) == doctest::Approx(-c.D).epsilon(1e-9));
    // beyond T the position is flat zero
    CHECK(std::abs(inventory_at(m, 10.0 + 1e-9)) < 1e-10);
    CHECK(std::abs(inventory_at(m, 11.0)) < 1e-10);
    CHECK_THROWS_AS(inventory_at(m, -0.1), config_error);
}

TEST_CASE("analytic impact response matches adaptive quadrature") {
    auto p = reference_problem(-0.5);
    const auto [c, m] = solve_closed_form(p);
    (void)c;
    for (double t : {0.0, 0.37, 2.0, 5.0, 8.6, 10.0}) {
        CAPTURE(t);
        CHECK(impact_response_at(p, m, t) ==
              doctest::Approx(impact_response_numeric(p, m, t)).epsilon(1e-9));
    }
    // hand-made measure with its own decay rate, off the solution manifold
    StrategyMeasure hand;
    hand.atom0 = -1.0;
    hand.B = 1.0;
    hand.C = -0.5;
    hand.gamma = 0.7;
    hand.x0 = 5.0;
    hand.T = 3.0;
    hand.atomT = -(hand.x0 + hand.atom0 + hand.B * (1.0 - std::exp(-0.7 * 3.0)) / 0.7 +
                   hand.C * 3.0);
    GssProblem q;
    q.x0 = 5.0;
    q.T = 3.0;
    q.signal = OuSignal{0.9, 0.0, -0.5};
    q.kernel = ExpKernel{0.1, 1.0};
    for (double t : {0.0, 0.5, 1.5, 2.9, 3.0}) {
        CAPTURE(t);
        CHECK(impact_response_at(q, hand, t) ==
              doctest::Approx(impact_response_numeric(q, hand, t)).epsilon(1e-9));
    }
}

TEST_CASE("analytic cost agrees with brute-force quadrature") {
    auto p = reference_problem(-0.5);
    const auto [c, m] = solve_closed_form(p);
    (void)c;
    CHECK(cost(p, m) == doctest::Approx(cost_numeric(p, m)).epsilon(1e-9));

    // non-optimal measure, running penalty switched on
    GssProblem q;
    q.x0 = 5.0;
    q.T = 3.0;
    q.signal = OuSignal{0.9, 0.0, -0.5};
    q.kernel = ExpKernel{0.1, 1.0};
    q.phi = 0.3;
    StrategyMeasure hand;
    hand.atom0 = -1.0;
    hand.B = 1.0;
    hand.C = -0.5;
    hand.gamma = 0.7;
    hand.x0 = 5.0;
    hand.T = 3.0;
    hand.atomT = -(hand.x0 + hand.atom0 + hand.B * (1.0 - std::exp(-0.7 * 3.0)) / 0.7 +
                   hand.C * 3.0);
    CHECK(cost(q, hand) == doctest::Approx(cost_numeric(q, hand)).epsilon(1e-9));
}

TEST_CASE("no admissible perturbation beats the closed form") {
    auto p = reference_problem(-0.5);
    const auto [c, m] = solve_closed_form(p);
    (void)c;
    const double best = cost(p, m);
    Rng rng(4711);
    for (int i = 0; i < 30; ++i) {
        StrategyMeasure pert = m;
        pert.atom0 += (rng.uniform() - 0.5);
        pert.B += (rng.uniform() - 0.5);
        pert.C += (rng.uniform() - 0.5);
        // restore the fuel constraint through the final block
        pert.atomT = 0.0;
        pert.atomT = -pert.terminal_residual();
        CHECK(cost(p, pert) >= best - 1e-10 * std::abs(best));
    }
}

TEST_CASE("instantaneous-impact limit strategy") {
    auto p = reference_problem(-0.5);
    CHECK(asymptotic_strategy(p, 0.0) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(std::abs(asymptotic_strategy(p, 10.0)) < 1e-12);
    CHECK_THROWS_AS(asymptotic_strategy(p, -0.1), config_error);
    CHECK_THROWS_AS(asymptotic_strategy(p, 10.1), config_error);

    // flat signal: pure TWAP
    auto flat = reference_problem(0.0);
    for (double t : linspace(0.0, 10.0, 11))
        CHECK(asymptotic_strategy(flat, t) ==
              doctest::Approx(10.0 * (1.0 - t / 10.0)).epsilon(1e-13));

    // the closed form converges to it as relaxation becomes instantaneous
    double prev_gap = 1e300;
    for (double rho : {1e2, 1e3, 1e4, 1e6}) {
        auto q = p;
        q.kernel.rho = rho;
        const auto [c2, m2] = solve_closed_form(q);
        (void)c2;
        double gap = 0.0;
        for (double t : linspace(1.0, 9.0, 81))
            gap = std::max(gap, std::abs(inventory_at(m2, t) - asymptotic_strategy(q, t)));
        CAPTURE(rho);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
    CHECK(prev_gap < 1e-3 * p.x0);  // at rho = 1e6 the paths have merged
}

TEST_CASE("problem and measure validation") {
    auto p = reference_problem(-0.5);
    p.phi = 0.1;
    CHECK_THROWS_AS(solve_closed_form(p), config_error);
    p.phi = 0.0;
    p.x0 = -1.0;
    CHECK_THROWS_AS(solve_closed_form(p), config_error);
    p.x0 = 10.0;
    p.T = 0.0;
    CHECK_THROWS_AS(solve_closed_form(p), config_error);

    StrategyMeasure bad;
    bad.x0 = 10.0;
    bad.T = 10.0;
    bad.gamma = 0.9;
    bad.C = 0.0;  // nothing ever trades: fuel violated
    CHECK_THROWS_AS(bad.validate(), config_error);
}
