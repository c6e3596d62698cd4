#pragma once

#include <cstdint>
#include <vector>

#include "sigexec/cj.hpp"
#include "sigexec/gss.hpp"

namespace sigexec {

enum class Framework { gss, cj };

// One deterministic curve per (signal level, kernel decay) pair.
struct GssScenario {
    double iota = 0.0;
    double rho = 1.0;
};

// (iota, x) window tabulated by value_surface_grid at t = 0.
struct SurfaceRange {
    double iota_lo = -0.5;
    double iota_hi = 0.5;
    double x_lo = 5.0;
    double x_hi = 10.0;
    int resolution = 41;  // nodes per axis
};

struct ScenarioSpec {
    Framework framework = Framework::gss;

    GssProblem gss;                      // kernel.rho / signal.iota swapped per scenario
    std::vector<GssScenario> scenarios;  // used when framework == gss

    CjProblem cj;                        // used when framework == cj
    int n_paths = 1;                     // stochastic paths (reference excluded)
    std::uint64_t master_seed = 20260819;

    int resolution = 101;         // output grid nodes over [0, T]
    int integration_steps = 1000; // total substeps budget across [0, T]

    SurfaceRange surface;

    void validate() const;
};

// Curves sampled on a shared time grid. For the stochastic engine row 0 is
// the noise-free reference path and rows 1..n_paths are the simulated ones;
// summaries are taken across the simulated rows only. For the deterministic
// engine there is one row per scenario and summaries run across scenarios.
// `rate` holds the inventory velocity dX/dt in both cases, so selling shows
// up negative everywhere.
struct TrajectoryBundle {
    std::vector<double> grid;
    std::vector<std::vector<double>> inventory;
    std::vector<std::vector<double>> rate;
    std::vector<std::vector<double>> signal;

    // Per-node summaries across sample rows (linear-interpolation quantiles).
    std::vector<double> q10, q25, q50, q75, q90, mean;

    std::vector<std::uint64_t> path_seeds;  // one per simulated row
    int steps_per_cell = 0;                 // substeps between adjacent nodes

    void validate() const;
};

// Closed-form inventory/rate/signal curves for each scenario; inventory is
// sampled just after any block trade, so the first node already reflects the
// initial block and the last node vanishes to solver precision.
TrajectoryBundle run_gss_scenarios(const ScenarioSpec& spec);

// Integrates dX/dt = -r*(t, X, I_t) along exactly sampled signal paths with
// a classical 4th-order step; the signal is drawn on the half-step grid so
// stage times line up with exact samples. Path seeds come from a splittable
// scheme, so growing n_paths leaves existing paths untouched.
TrajectoryBundle run_cj_paths(const ScenarioSpec& spec);

struct SurfacePoint {
    double iota = 0.0;
    double x = 0.0;
    double value = 0.0;
};

// Tabulates the t = 0 value surface over spec.surface, iota-major ordering.
std::vector<SurfacePoint> value_surface_grid(const ScenarioSpec& spec);

}  // namespace sigexec
