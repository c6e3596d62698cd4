#pragma once

#include <cmath>
#include <cstdint>

namespace sigexec {

// Deterministic random source used everywhere randomness is needed.
//
// Core generator: splitmix64 (Steele, Lea, Vigna). Chosen over
// std::mt19937 because the stream is defined by ~5 lines of integer
// arithmetic we control, so results are reproducible across standard
// libraries, and because its trivial state makes per-path seed splitting
// cheap. Gaussians come from the Marsaglia polar method rather than
// std::normal_distribution, whose output is implementation-defined.
// Runs record the generator id "splitmix64-polar" in their metadata.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform on (0,1): 53 random bits, offset so 0 is never returned.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via the polar rejection method. Pairs are generated
    // two at a time; the spare is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Derives an independent stream seed for a sub-task (e.g. Monte Carlo path
// `index`) from a master seed. Uses the splitmix64 finalizer on the pair, so
// seeds for distinct indices are decorrelated and the mapping is stable.
inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master ^ (0x9E3779B97F4A7C15ull * (index + 1));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace sigexec
