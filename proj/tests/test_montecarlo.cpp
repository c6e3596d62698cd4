// Simulation engine checks: closed-form scenario curves, stochastic inventory
// fans against their noise-free reference, seed stability, and the value
// surface tabulation.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include "sigexec/cj.hpp"
#include "sigexec/common.hpp"
#include "sigexec/montecarlo.hpp"

using namespace sigexec;

namespace {

ScenarioSpec gss_spec(std::vector<GssScenario> scenarios) {
    ScenarioSpec spec;
    spec.framework = Framework::gss;
    spec.gss.x0 = 10.0;
    spec.gss.T = 10.0;
    spec.gss.signal = OuSignal{0.9, 0.0, 0.0};
    spec.gss.kernel = ExpKernel{0.1, 1.0};
    spec.scenarios = std::move(scenarios);
    return spec;
}

// Inventory fan parameters: gamma=0.1, sigma=0.1, I0=0, T=10, kappa=0.5,
// phi=0.1, varrho=10, X0=10.
ScenarioSpec cj_spec(int n_paths) {
    ScenarioSpec spec;
    spec.framework = Framework::cj;
    spec.cj.kappa = 0.5;
    spec.cj.phi = 0.1;
    spec.cj.varrho = 10.0;
    spec.cj.T = 10.0;
    spec.cj.signal = OuSignal{0.1, 0.1, 0.0};
    spec.cj.x0 = 10.0;
    spec.n_paths = n_paths;
    return spec;
}

}  // namespace

TEST_CASE("no-signal scenario gives the block-rate-block profile") {
    auto spec = gss_spec({{0.0, 1.0}});
    const auto b = run_gss_scenarios(spec);

    // Blocks of x0/(2+T) = 5/6 at both ends, constant rate between.
    CHECK(b.inventory[0].front() == doctest::Approx(10.0 - 10.0 / 12.0).epsilon(1e-12));
    CHECK(std::abs(b.inventory[0].back()) < 1e-10);
    for (std::size_t j = 0; j < b.grid.size(); ++j) {
        CHECK(b.rate[0][j] == doctest::Approx(-10.0 / 12.0).epsilon(1e-12));
        CHECK(b.signal[0][j] == 0.0);
    }
    // Piecewise-linear interior: second differences vanish.
    for (std::size_t j = 2; j < b.grid.size(); ++j) {
        const double dd = b.inventory[0][j] - 2.0 * b.inventory[0][j - 1] +
                          b.inventory[0][j - 2];
        if (j + 1 < b.grid.size()) {
            CHECK(std::abs(dd) < 1e-10);
        }
    }
}

TEST_CASE("positive signal while selling starts with purchases") {
    // Expecting the price to rise, the seller front-loads a buy block and
    // rides the inventory above its starting level before selling it all off.
    auto spec = gss_spec({{0.5, 1.0}});
    const auto b = run_gss_scenarios(spec);
    CHECK(b.inventory[0].front() > 10.0);
    CHECK(b.inventory[0][10] > 10.0);  // still long of the start at t = 1
    CHECK(b.rate[0].back() < 0.0);
    CHECK(std::abs(b.inventory[0].back()) < 1e-10);
}

TEST_CASE("faster impact decay shrinks the blocks and speeds up early flow") {
    // Blocks exist to pre-load impact that will have decayed by the time it
    // matters; when the decay is fast there is less to gain, so the atoms
    // shrink (they vanish entirely in the instantaneous-impact limit) while
    // the early trading speed picks up the slack.
    auto spec = gss_spec({{-0.5, 1.0}, {-0.5, 2.5}});
    const auto b = run_gss_scenarios(spec);
    const double jump_slow = 10.0 - b.inventory[0].front();
    const double jump_fast = 10.0 - b.inventory[1].front();
    CHECK(jump_fast < jump_slow);
    CHECK(std::abs(b.rate[1].front()) > std::abs(b.rate[0].front()));
}

TEST_CASE("scenario curves are reproducible") {
    auto spec = gss_spec({{-0.5, 1.0}, {0.0, 1.0}, {0.5, 2.5}});
    const auto b1 = run_gss_scenarios(spec);
    const auto b2 = run_gss_scenarios(spec);
    REQUIRE(b1.inventory.size() == b2.inventory.size());
    for (std::size_t i = 0; i < b1.inventory.size(); ++i) {
        for (std::size_t j = 0; j < b1.grid.size(); ++j) {
            CHECK(b1.inventory[i][j] == b2.inventory[i][j]);
            CHECK(b1.rate[i][j] == b2.rate[i][j]);
        }
    }
}

TEST_CASE("quiet market collapses every path onto the reference") {
    auto spec = cj_spec(5);
    spec.cj.signal.sigma = 0.0;
    const auto b = run_cj_paths(spec);
    REQUIRE(b.inventory.size() == 6);  // reference + 5 paths
    for (std::size_t i = 1; i < b.inventory.size(); ++i) {
        for (std::size_t j = 0; j < b.grid.size(); ++j) {
            CHECK(b.inventory[i][j] == b.inventory[0][j]);
        }
    }
}

TEST_CASE("path fan stays centered on the noise-free trajectory") {
    // The feedback rate is affine in (X, I) and E[I_t] = 0, so the path mean
    // tracks the reference; 3 standard errors bounds the MC wobble.
    auto spec = cj_spec(400);
    const auto b = run_cj_paths(spec);

    for (std::size_t j = 0; j < b.grid.size(); ++j) {
        double acc = 0.0, acc2 = 0.0;
        for (std::size_t i = 1; i < b.inventory.size(); ++i) {
            acc += b.inventory[i][j];
            acc2 += b.inventory[i][j] * b.inventory[i][j];
        }
        const double n = static_cast<double>(spec.n_paths);
        const double mean = acc / n;
        const double var = std::max(0.0, acc2 / n - mean * mean);
        const double se = std::sqrt(var / n);
        CHECK(std::abs(mean - b.inventory[0][j]) <= 3.0 * se + 1e-12);
        CHECK(b.mean[j] == doctest::Approx(mean).epsilon(1e-12));
    }
}

TEST_CASE("terminal inventory is small but nonzero under a finite penalty") {
    auto spec = cj_spec(30);
    const auto b = run_cj_paths(spec);
    const double ref_end = b.inventory[0].back();
    CHECK(std::abs(ref_end) > 1e-6);
    CHECK(std::abs(ref_end) < 0.1);
    // Closed-form check: with iota = 0 the reference is x0 times the decay
    // factor of the feedback flow.
    const CjCoefficients coeffs(spec.cj);
    CHECK(ref_end == doctest::Approx(10.0 * coeffs.growth(0.0, 10.0)).epsilon(1e-6));
}

TEST_CASE("same master seed reproduces the fan bit for bit") {
    auto spec = cj_spec(20);
    const auto b1 = run_cj_paths(spec);
    const auto b2 = run_cj_paths(spec);
    for (std::size_t i = 0; i < b1.inventory.size(); ++i) {
        for (std::size_t j = 0; j < b1.grid.size(); ++j) {
            CHECK(b1.inventory[i][j] == b2.inventory[i][j]);
        }
    }

    auto other = spec;
    other.master_seed += 1;
    const auto b3 = run_cj_paths(other);
    double max_diff = 0.0;
    for (std::size_t j = 0; j < b1.grid.size(); ++j) {
        max_diff = std::max(max_diff, std::abs(b1.inventory[1][j] - b3.inventory[1][j]));
    }
    CHECK(max_diff > 1e-6);
}

TEST_CASE("growing the path count leaves existing paths untouched") {
    auto small = cj_spec(10);
    auto large = cj_spec(25);
    const auto b_small = run_cj_paths(small);
    const auto b_large = run_cj_paths(large);
    for (std::size_t i = 0; i <= 10; ++i) {
        for (std::size_t j = 0; j < b_small.grid.size(); ++j) {
            CHECK(b_small.inventory[i][j] == b_large.inventory[i][j]);
        }
    }
}

TEST_CASE("quantile bands widen with signal noise and collapse without it") {
    auto narrow = cj_spec(200);
    narrow.cj.signal.sigma = 0.05;
    auto wide = cj_spec(200);
    wide.cj.signal.sigma = 0.10;
    const auto bn = run_cj_paths(narrow);
    const auto bw = run_cj_paths(wide);
    const std::size_t mid = bn.grid.size() / 2;
    CHECK(bw.q90[mid] - bw.q10[mid] > bn.q90[mid] - bn.q10[mid]);

    auto quiet = cj_spec(50);
    quiet.cj.signal.sigma = 1e-12;
    const auto bq = run_cj_paths(quiet);
    for (std::size_t j = 0; j < bq.grid.size(); ++j) {
        CHECK(bq.q90[j] - bq.q10[j] < 1e-8);
    }
}

TEST_CASE("step refinement converges at fourth order on the quiet flow") {
    auto spec = cj_spec(1);
    spec.cj.signal = OuSignal{0.1, 0.0, 0.5};  // live deterministic signal

    const auto at_steps = [&](int steps) {
        auto s = spec;
        s.integration_steps = steps;
        return run_cj_paths(s).inventory[0].back();
    };
    const double fine = at_steps(16000);
    const double e250 = std::abs(at_steps(250) - fine);
    const double e500 = std::abs(at_steps(500) - fine);
    const double e1000 = std::abs(at_steps(1000) - fine);
    CHECK(e500 < e250 / 8.0);
    CHECK(e1000 < e500 / 8.0);
}

TEST_CASE("value surface rises with the signal when holding inventory to sell") {
    auto spec = cj_spec(1);
    const auto table = value_surface_grid(spec);
    const int n = spec.surface.resolution;
    REQUIRE(static_cast<int>(table.size()) == n * n);

    // iota-major layout: entries j, j+n, j+2n, ... share the x value.
    for (int j = 0; j < n; ++j) {
        for (int i = 1; i < n; ++i) {
            const auto& prev = table[static_cast<std::size_t>((i - 1) * n + j)];
            const auto& cur = table[static_cast<std::size_t>(i * n + j)];
            CHECK(cur.value > prev.value);
        }
    }

    // Spot checks against the direct evaluation, which integrates the full
    // expectation instead of the factored quadratic form.
    for (std::size_t idx : {static_cast<std::size_t>(3 * n + 7),
                            static_cast<std::size_t>(17 * n + 31),
                            table.size() - 1}) {
        const auto& probe = table[idx];
        const double direct = value_surface(spec.cj, 0.0, probe.iota, probe.x);
        CHECK(probe.value == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("invalid specs are rejected") {
    auto spec = gss_spec({{0.0, 1.0}});
    spec.framework = Framework::cj;
    spec.cj = cj_spec(1).cj;
    CHECK_THROWS_AS(run_gss_scenarios(spec), config_error);

    auto flipped = cj_spec(5);
    flipped.framework = Framework::gss;
    flipped.scenarios = {{0.0, 1.0}};
    flipped.gss = gss_spec({{0.0, 1.0}}).gss;
    CHECK_THROWS_AS(run_cj_paths(flipped), config_error);

    auto no_scenarios = gss_spec({});
    CHECK_THROWS_AS(run_gss_scenarios(no_scenarios), config_error);

    auto with_phi = gss_spec({{0.0, 1.0}});
    with_phi.gss.phi = 0.1;
    CHECK_THROWS_AS(run_gss_scenarios(with_phi), config_error);

    auto bad_paths = cj_spec(0);
    CHECK_THROWS_AS(run_cj_paths(bad_paths), config_error);

    auto coarse = cj_spec(1);
    coarse.resolution = 1;
    CHECK_THROWS_AS(run_cj_paths(coarse), config_error);

    auto window = cj_spec(1);
    window.surface.x_lo = window.surface.x_hi;
    CHECK_THROWS_AS(value_surface_grid(window), config_error);
}
