#include "sigexec/cj.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace sigexec {

namespace {
using boost::math::quadrature::gauss_kronrod;

// Adaptive 15-point Gauss-Kronrod. The relative 1e-12 target comfortably
// beats the 1e-10 absolute contract for these O(1)-scaled integrands.
template <typename F>
double integrate(F&& f, double a, double b) {
    if (!(b > a)) return 0.0;
    return gauss_kronrod<double, 15>::integrate(std::forward<F>(f), a, b, 14, 1e-12);
}
}  // namespace

CjCoefficients::CjCoefficients(const CjProblem& p) {
    p.validate();
    kappa_ = p.kappa;
    phi_ = p.phi;
    varrho_ = p.varrho;
    T_ = p.T;
    gamma_ = p.signal.gamma;
    sigma_ = p.signal.sigma;
    if (phi_ > 0.0) {
        regime_ = Regime::general;
        sqkf_ = std::sqrt(kappa_ * phi_);
        beta_ = std::sqrt(phi_ / kappa_);
        zeta_ = (varrho_ + sqkf_) / (varrho_ - sqkf_);  // <= -1 or > 1
    } else if (varrho_ > 0.0) {
        regime_ = Regime::terminal_only;
    } else {
        regime_ = Regime::no_penalties;
    }
}

void CjCoefficients::require_in_horizon(double t, const char* who) const {
    if (!(t >= 0.0) || !(t <= T_))
        throw config_error(std::string(who) + ": t must lie in [0, " +
                           std::to_string(T_) + "], got " + std::to_string(t));
}

double CjCoefficients::v2(double t) const {
    require_in_horizon(t, "v2");
    switch (regime_) {
        case Regime::general: {
            // multiply numerator and denominator of the textbook form by
            // e^{-2 beta (T-t)} so nothing overflows for large horizons
            const double e = std::exp(-2.0 * beta_ * (T_ - t));
            return sqkf_ * (e + zeta_) / (e - zeta_);
        }
        case Regime::terminal_only:
            return -kappa_ * varrho_ / (kappa_ + varrho_ * (T_ - t));
        case Regime::no_penalties:
            return 0.0;
    }
    return 0.0;
}

double CjCoefficients::int_v2(double t, double s) const {
    require_in_horizon(t, "int_v2");
    require_in_horizon(s, "int_v2");
    if (!(s >= t)) throw config_error("int_v2: requires s >= t");
    switch (regime_) {
        case Regime::general: {
            // same 1/w normalization as v2; both shifted exponentials share a
            // sign, so the log argument is positive
            const double es = std::exp(-2.0 * beta_ * (T_ - s));
            const double et = std::exp(-2.0 * beta_ * (T_ - t));
            return -sqkf_ * (s - t) + kappa_ * std::log((es - zeta_) / (et - zeta_));
        }
        case Regime::terminal_only:
            return kappa_ * std::log((kappa_ + varrho_ * (T_ - s)) /
                                     (kappa_ + varrho_ * (T_ - t)));
        case Regime::no_penalties:
            return 0.0;
    }
    return 0.0;
}

double CjCoefficients::growth(double t, double s) const {
    require_in_horizon(t, "growth");
    require_in_horizon(s, "growth");
    if (!(s >= t)) throw config_error("growth: requires s >= t");
    switch (regime_) {
        case Regime::general: {
            const double es = std::exp(-2.0 * beta_ * (T_ - s));
            const double et = std::exp(-2.0 * beta_ * (T_ - t));
            return std::exp(-beta_ * (s - t)) * (es - zeta_) / (et - zeta_);
        }
        case Regime::terminal_only:
            return (kappa_ + varrho_ * (T_ - s)) / (kappa_ + varrho_ * (T_ - t));
        case Regime::no_penalties:
            return 1.0;
    }
    return 1.0;
}

double CjCoefficients::signal_factor(double t) const {
    require_in_horizon(t, "signal_factor");
    if (regime_ == Regime::no_penalties) {
        // Phi == 1: the integral is elementary
        return (T_ - t) * detail::expm1_over(-gamma_ * (T_ - t));
    }
    return integrate([&](double s) { return std::exp(-gamma_ * (s - t)) * growth(t, s); },
                     t, T_);
}

double CjCoefficients::v0(double t, double iota) const {
    require_in_horizon(t, "v0");
    const double i2 = iota * iota;
    const double s2 = sigma_ * sigma_;
    return integrate(
               [&](double s) {
                   const double h = signal_factor(s);
                   const double decay2 = std::exp(-2.0 * gamma_ * (s - t));
                   const double second_moment =
                       i2 * decay2 +
                       s2 * (s - t) * detail::expm1_over(-2.0 * gamma_ * (s - t));
                   return h * h * second_moment;
               },
               t, T_) /
           (4.0 * kappa_);
}

double CjCoefficients::v2_fuel(double t) const {
    if (!(t >= 0.0) || !(t < T_))
        throw config_error("v2_fuel: t must lie in [0, T), got " + std::to_string(t));
    const double tau = T_ - t;
    if (regime_ == Regime::general) {
        const double a = beta_ * tau;
        // series for small arguments keeps coth from losing precision
        if (a < 1e-4) return -(kappa_ / tau + phi_ * tau / 3.0);
        return -sqkf_ / std::tanh(a);
    }
    return -kappa_ / tau;  // vanishing-phi limit
}

double CjCoefficients::growth_fuel(double t, double s) const {
    if (!(t >= 0.0) || !(s >= t) || !(s <= T_))
        throw config_error("growth_fuel: requires 0 <= t <= s <= T");
    if (regime_ == Regime::general) {
        // sinh(beta(T-s))/sinh(beta(T-t)) = e^{beta(t-s)} expm1(-2a)/expm1(-2b)
        const double a = beta_ * (T_ - s), b = beta_ * (T_ - t);
        if (b == 0.0) return 1.0;  // only reachable with s == t == T
        return std::exp(a - b) * std::expm1(-2.0 * a) / std::expm1(-2.0 * b);
    }
    if (t == T_) return 1.0;
    return (T_ - s) / (T_ - t);
}

double CjCoefficients::signal_factor_fuel(double t) const {
    if (!(t >= 0.0) || !(t < T_))
        throw config_error("signal_factor_fuel: t must lie in [0, T), got " +
                           std::to_string(t));
    return integrate(
        [&](double s) { return std::exp(-gamma_ * (s - t)) * growth_fuel(t, s); }, t, T_);
}

double v2_at(const CjProblem& p, double t) { return CjCoefficients(p).v2(t); }

double v1_at(const CjProblem& p, double t, double iota) {
    return CjCoefficients(p).v1(t, iota);
}

double v0_at(const CjProblem& p, double t, double iota) {
    return CjCoefficients(p).v0(t, iota);
}

double optimal_rate(const CjProblem& p, double t, double x, double iota) {
    const CjCoefficients c(p);
    return -(2.0 * c.v2(t) * x + c.v1(t, iota)) / (2.0 * p.kappa);
}

double fuel_limit_rate(const CjProblem& p, double t, double x, double iota) {
    const CjCoefficients c(p);
    return -(2.0 * c.v2_fuel(t) * x + iota * c.signal_factor_fuel(t)) / (2.0 * p.kappa);
}

double value_surface(const CjProblem& p, double t, double iota, double x) {
    const CjCoefficients c(p);
    return c.v0(t, iota) + x * c.v1(t, iota) + x * x * c.v2(t);
}

}  // namespace sigexec
