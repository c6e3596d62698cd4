#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <vector>

#include "sigexec/common.hpp"

namespace sigexec {

// Solvers only ever ask a signal two questions: the conditional mean of the
// future drift and its running integral. Anything answering those is usable,
// which keeps the execution layer decoupled from the OU model below.
template <typename S>
concept PredictiveSignal = requires(const S& s, double t) {
    { s.conditional_mean(t) } -> std::convertible_to<double>;
    { s.integrated_conditional_mean(t) } -> std::convertible_to<double>;
};

namespace detail {
// expm1(z)/z, continuous through z = 0. Keeps (1-e^{-g t})/g accurate when
// g*t underflows the subtraction.
inline double expm1_over(double z) {
    return z == 0.0 ? 1.0 : std::expm1(z) / z;
}
}  // namespace detail

// Ornstein-Uhlenbeck drift signal observed at value `iota` at time 0:
//   dI_t = -gamma I_t dt + sigma dW_t,  I_0 = iota.
struct OuSignal {
    double gamma = 1.0;   // mean-reversion speed, > 0
    double sigma = 0.0;   // diffusion scale, >= 0
    double iota = 0.0;    // value conditioned on at time 0

    void validate() const {
        if (!(gamma > 0.0) || !std::isfinite(gamma))
            throw config_error("OuSignal: gamma must be positive and finite, got " +
                               std::to_string(gamma));
        if (!(sigma >= 0.0) || !std::isfinite(sigma))
            throw config_error("OuSignal: sigma must be non-negative and finite, got " +
                               std::to_string(sigma));
        if (!std::isfinite(iota))
            throw config_error("OuSignal: iota must be finite");
    }

    // E_iota[I_t] = iota * e^{-gamma t}
    double conditional_mean(double t) const { return iota * std::exp(-gamma * t); }

    // int_0^t E_iota[I_s] ds = (iota/gamma)(1 - e^{-gamma t}),
    // computed in expm1 form so gamma -> 0 degrades gracefully to iota*t.
    double integrated_conditional_mean(double t) const {
        return iota * t * detail::expm1_over(-gamma * t);
    }

    // Var[I_t | I_0] = sigma^2 (1 - e^{-2 gamma t}) / (2 gamma)
    double conditional_variance(double t) const {
        return sigma * sigma * t * detail::expm1_over(-2.0 * gamma * t);
    }
};

static_assert(PredictiveSignal<OuSignal>);

// One-step transition pieces for exact simulation over a step of length dt:
//   I_{t+dt} = decay * I_t + step_sd * xi,   xi ~ N(0,1).
// Exact for any dt, so grids never owe accuracy to step size.
inline double ou_decay(const OuSignal& sig, double dt) { return std::exp(-sig.gamma * dt); }

inline double ou_step_sd(const OuSignal& sig, double dt) {
    return sig.sigma * std::sqrt(dt * detail::expm1_over(-2.0 * sig.gamma * dt));
}

// A realized signal trajectory on a fixed grid, tagged with the seed that
// produced it so any consumer can regenerate it.
struct SignalPath {
    std::vector<double> times;
    std::vector<double> values;
    std::uint64_t seed = 0;
};

// Samples I exactly on `grid` (strictly increasing, grid[0] >= 0), starting
// from I_0 = iota at time 0. Uses the exact Gaussian transition, so the
// distribution of the result is grid-independent: refining the grid and
// restricting back gives the same law (semigroup property).
SignalPath simulate_path(const OuSignal& sig, const std::vector<double>& grid,
                         std::uint64_t seed);

}  // namespace sigexec
