#include "sigexec/signals.hpp"

#include "sigexec/rng.hpp"

namespace sigexec {

SignalPath simulate_path(const OuSignal& sig, const std::vector<double>& grid,
                         std::uint64_t seed) {
    sig.validate();
    if (grid.empty()) throw config_error("simulate_path: grid must be non-empty");
    if (grid.front() < 0.0)
        throw config_error("simulate_path: grid must start at or after time 0, got " +
                           std::to_string(grid.front()));
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw config_error("simulate_path: grid must be strictly increasing at index " +
                               std::to_string(i));

    Rng rng(seed);
    SignalPath path;
    path.times = grid;
    path.values.resize(grid.size());
    path.seed = seed;

    double t_prev = 0.0;
    double value = sig.iota;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double dt = grid[i] - t_prev;
        if (dt > 0.0) {
            const double sd = ou_step_sd(sig, dt);
            value = value * ou_decay(sig, dt) + (sd > 0.0 ? sd * rng.normal() : 0.0);
        }
        path.values[i] = value;
        t_prev = grid[i];
    }
    return path;
}

}  // namespace sigexec
