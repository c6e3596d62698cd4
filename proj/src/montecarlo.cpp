#include "sigexec/montecarlo.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "sigexec/common.hpp"
#include "sigexec/rng.hpp"
#include "sigexec/signals.hpp"

namespace sigexec {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
    }
    out.back() = hi;
    return out;
}

// Quantile with linear interpolation between order statistics; `sorted` must
// be ascending.
double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) {
        return sorted.back();
    }
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

// Per-node summaries across inventory rows [first_row, end).
void summarize(TrajectoryBundle& b, std::size_t first_row) {
    const std::size_t nodes = b.grid.size();
    const std::size_t n = b.inventory.size() - first_row;
    b.q10.assign(nodes, 0.0);
    b.q25.assign(nodes, 0.0);
    b.q50.assign(nodes, 0.0);
    b.q75.assign(nodes, 0.0);
    b.q90.assign(nodes, 0.0);
    b.mean.assign(nodes, 0.0);

    std::vector<double> column(n);
    for (std::size_t j = 0; j < nodes; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            column[i] = b.inventory[first_row + i][j];
            acc += column[i];
        }
        std::sort(column.begin(), column.end());
        b.q10[j] = quantile_sorted(column, 0.10);
        b.q25[j] = quantile_sorted(column, 0.25);
        b.q50[j] = quantile_sorted(column, 0.50);
        b.q75[j] = quantile_sorted(column, 0.75);
        b.q90[j] = quantile_sorted(column, 0.90);
        b.mean[j] = acc / static_cast<double>(n);
    }
}

}  // namespace

void ScenarioSpec::validate() const {
    if (n_paths < 1) {
        throw config_error("scenario spec: n_paths must be at least 1");
    }
    if (resolution < 2) {
        throw config_error("scenario spec: output grid needs at least 2 nodes");
    }
    if (integration_steps < 1) {
        throw config_error("scenario spec: integration_steps must be positive");
    }
    if (framework == Framework::gss) {
        gss.validate();
        if (scenarios.empty()) {
            throw config_error("scenario spec: no (iota, rho) scenarios given");
        }
        for (const auto& sc : scenarios) {
            if (!std::isfinite(sc.iota) || !std::isfinite(sc.rho) || sc.rho <= 0.0) {
                throw config_error("scenario spec: each scenario needs finite iota and rho > 0");
            }
        }
    } else {
        cj.validate();
    }
    if (surface.resolution < 2 || !(surface.iota_hi > surface.iota_lo) ||
        !(surface.x_hi > surface.x_lo)) {
        throw config_error("scenario spec: surface window must be nondegenerate");
    }
}

void TrajectoryBundle::validate() const {
    const std::size_t nodes = grid.size();
    if (nodes < 2) {
        throw config_error("trajectory bundle: grid needs at least 2 nodes");
    }
    if (rate.size() != inventory.size() || signal.size() != inventory.size()) {
        throw config_error("trajectory bundle: row counts differ across arrays");
    }
    for (std::size_t i = 0; i < inventory.size(); ++i) {
        if (inventory[i].size() != nodes || rate[i].size() != nodes ||
            signal[i].size() != nodes) {
            throw config_error("trajectory bundle: row length differs from grid");
        }
    }
    const bool has_summary = !q10.empty();
    for (const auto* q : {&q10, &q25, &q50, &q75, &q90, &mean}) {
        if (q->size() != (has_summary ? nodes : 0)) {
            throw config_error("trajectory bundle: summary length differs from grid");
        }
    }
    for (std::size_t j = 0; has_summary && j < nodes; ++j) {
        if (!(q10[j] <= q25[j] && q25[j] <= q50[j] && q50[j] <= q75[j] &&
              q75[j] <= q90[j])) {
            throw config_error("trajectory bundle: quantiles out of order");
        }
    }
}

TrajectoryBundle run_gss_scenarios(const ScenarioSpec& spec) {
    spec.validate();
    if (spec.framework != Framework::gss) {
        throw config_error("run_gss_scenarios: spec targets the stochastic engine");
    }
    if (spec.gss.phi != 0.0) {
        throw config_error(
            "run_gss_scenarios: closed-form curves require phi = 0");
    }

    TrajectoryBundle b;
    b.grid = linspace(0.0, spec.gss.T, spec.resolution);
    b.steps_per_cell = 1;

    for (const auto& sc : spec.scenarios) {
        GssProblem p = spec.gss;
        p.signal.iota = sc.iota;
        p.kernel.rho = sc.rho;
        const auto [c, m] = solve_closed_form(p);

        std::vector<double> inv(b.grid.size());
        std::vector<double> vel(b.grid.size());
        std::vector<double> sig(b.grid.size());
        for (std::size_t j = 0; j < b.grid.size(); ++j) {
            const double t = b.grid[j];
            if (j == 0) {
                inv[j] = p.x0 + c.A;  // just after the initial block
            } else if (j + 1 == b.grid.size()) {
                inv[j] = inventory_at(m, t) + m.atomT;  // just after the final block
            } else {
                inv[j] = inventory_at(m, t);
            }
            vel[j] = density_rate(m, t);
            sig[j] = p.signal.conditional_mean(t);
        }
        b.inventory.push_back(std::move(inv));
        b.rate.push_back(std::move(vel));
        b.signal.push_back(std::move(sig));
    }
    summarize(b, 0);
    b.validate();
    return b;
}

TrajectoryBundle run_cj_paths(const ScenarioSpec& spec) {
    spec.validate();
    if (spec.framework != Framework::cj) {
        throw config_error("run_cj_paths: spec targets the deterministic engine");
    }
    const CjProblem& p = spec.cj;
    const CjCoefficients coeffs(p);

    const int cells = spec.resolution - 1;
    const int per_cell = std::max(1, (spec.integration_steps + cells - 1) / cells);
    const int n_steps = cells * per_cell;
    const double h = p.T / n_steps;

    TrajectoryBundle b;
    b.grid = linspace(0.0, p.T, spec.resolution);
    b.steps_per_cell = per_cell;

    // Stage times sit on the half-step lattice; tabulating the feedback
    // coefficients once keeps the per-path loop at a few flops per stage.
    // Velocity: dX/dt = -r*(t, x, i) = (v2(t)/kappa) x + (h(t)/(2 kappa)) i.
    const int fine_n = 2 * n_steps;
    std::vector<double> ftimes(static_cast<std::size_t>(fine_n) + 1);
    for (int k = 0; k <= fine_n; ++k) {
        ftimes[static_cast<std::size_t>(k)] = p.T * k / fine_n;
    }
    ftimes.back() = p.T;

    std::vector<double> fb_x(ftimes.size());
    std::vector<double> fb_i(ftimes.size());
    for (std::size_t k = 0; k < ftimes.size(); ++k) {
        fb_x[k] = coeffs.v2(ftimes[k]) / p.kappa;
        fb_i[k] = coeffs.signal_factor(ftimes[k]) / (2.0 * p.kappa);
    }

    const auto integrate_path = [&](const std::vector<double>& ivals) {
        std::vector<double> inv(b.grid.size());
        std::vector<double> vel(b.grid.size());
        std::vector<double> sig(b.grid.size());
        double x = p.x0;
        inv[0] = x;
        vel[0] = fb_x[0] * x + fb_i[0] * ivals[0];
        sig[0] = ivals[0];
        std::size_t node = 1;
        for (int s = 0; s < n_steps; ++s) {
            const auto k = static_cast<std::size_t>(2 * s);
            const double k1 = fb_x[k] * x + fb_i[k] * ivals[k];
            const double k2 =
                fb_x[k + 1] * (x + 0.5 * h * k1) + fb_i[k + 1] * ivals[k + 1];
            const double k3 =
                fb_x[k + 1] * (x + 0.5 * h * k2) + fb_i[k + 1] * ivals[k + 1];
            const double k4 = fb_x[k + 2] * (x + h * k3) + fb_i[k + 2] * ivals[k + 2];
            x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if ((s + 1) % per_cell == 0) {
                inv[node] = x;
                vel[node] = fb_x[k + 2] * x + fb_i[k + 2] * ivals[k + 2];
                sig[node] = ivals[k + 2];
                ++node;
            }
        }
        b.inventory.push_back(std::move(inv));
        b.rate.push_back(std::move(vel));
        b.signal.push_back(std::move(sig));
    };

    // Row 0: the same flow along the noise-free signal.
    OuSignal quiet = p.signal;
    quiet.sigma = 0.0;
    integrate_path(simulate_path(quiet, ftimes, spec.master_seed).values);

    b.path_seeds.reserve(static_cast<std::size_t>(spec.n_paths));
    for (int idx = 0; idx < spec.n_paths; ++idx) {
        const std::uint64_t seed =
            split_seed(spec.master_seed, static_cast<std::uint64_t>(idx));
        b.path_seeds.push_back(seed);
        integrate_path(simulate_path(p.signal, ftimes, seed).values);
    }

    summarize(b, 1);
    b.validate();
    return b;
}

std::vector<SurfacePoint> value_surface_grid(const ScenarioSpec& spec) {
    spec.cj.validate();
    const SurfaceRange& r = spec.surface;
    if (r.resolution < 2 || !(r.iota_hi > r.iota_lo) || !(r.x_hi > r.x_lo)) {
        throw config_error("value_surface_grid: surface window must be nondegenerate");
    }
    const auto iotas = linspace(r.iota_lo, r.iota_hi, r.resolution);
    const auto xs = linspace(r.x_lo, r.x_hi, r.resolution);

    // The surface is quadratic in (iota, x): value = Q + P iota^2
    // + iota x h(0) + x^2 v2(0), where P and Q split the constant term into
    // its signal-driven and noise-driven integrals. Evaluating the four
    // scalars once avoids a nested quadrature per grid point.
    const CjProblem& p = spec.cj;
    const CjCoefficients coeffs(p);
    const double v2_0 = coeffs.v2(0.0);
    const double h_0 = coeffs.signal_factor(0.0);
    const double gamma = p.signal.gamma;
    const auto h_sq = [&](double s) {
        const double h = coeffs.signal_factor(s);
        return h * h;
    };
    const double quarter_kappa = 1.0 / (4.0 * p.kappa);
    const double P = quarter_kappa *
                     boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                         [&](double s) { return h_sq(s) * std::exp(-2.0 * gamma * s); },
                         0.0, p.T, 8, 1e-12);
    const double sig2 = p.signal.sigma * p.signal.sigma;
    const double Q =
        sig2 * quarter_kappa *
        boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
            [&](double s) {
                return h_sq(s) * s * detail::expm1_over(-2.0 * gamma * s);
            },
            0.0, p.T, 8, 1e-12);

    std::vector<SurfacePoint> out;
    out.reserve(iotas.size() * xs.size());
    for (double iota : iotas) {
        for (double x : xs) {
            const double value =
                Q + P * iota * iota + iota * x * h_0 + x * x * v2_0;
            out.push_back({iota, x, value});
        }
    }
    return out;
}

}  // namespace sigexec
