#pragma once

#include <cmath>
#include <string>

#include "sigexec/common.hpp"
#include "sigexec/signals.hpp"

namespace sigexec {

// Execution under purely instantaneous (temporary) impact kappa * rate, with
// a running inventory penalty phi, a terminal penalty varrho on what is left
// at T, and the OU drift signal. The value function separates as
// cash + x * price + v0(t, iota) + x * v1(t, iota) + x^2 * v2(t),
// and the optimal selling rate is the linear feedback
//   r*(t) = -(1/2 kappa) (2 v2(t) x + v1(t, iota_t)).
struct CjProblem {
    double kappa = 1.0;    // temporary impact scale, > 0
    double phi = 0.0;      // running inventory penalty, >= 0
    double varrho = 0.0;   // terminal inventory penalty, >= 0
    double sigmaP = 0.0;   // price volatility, >= 0 (does not enter the v-terms)
    double T = 1.0;        // horizon, > 0
    OuSignal signal;
    double x0 = 0.0;       // initial inventory
    double c0 = 0.0;       // initial cash
    double p0 = 0.0;       // initial price

    void validate() const {
        if (!(kappa > 0.0) || !std::isfinite(kappa))
            throw config_error("CjProblem: kappa must be positive and finite, got " +
                               std::to_string(kappa));
        if (!(phi >= 0.0) || !std::isfinite(phi))
            throw config_error("CjProblem: phi must be non-negative and finite, got " +
                               std::to_string(phi));
        if (!(varrho >= 0.0) || !std::isfinite(varrho))
            throw config_error("CjProblem: varrho must be non-negative and finite, got " +
                               std::to_string(varrho));
        if (!(sigmaP >= 0.0) || !std::isfinite(sigmaP))
            throw config_error("CjProblem: sigmaP must be non-negative, got " +
                               std::to_string(sigmaP));
        if (!(T > 0.0) || !std::isfinite(T))
            throw config_error("CjProblem: T must be positive and finite, got " +
                               std::to_string(T));
        if (!std::isfinite(x0) || !std::isfinite(c0) || !std::isfinite(p0))
            throw config_error("CjProblem: x0, c0, p0 must be finite");
        signal.validate();
        // The balanced case varrho == sqrt(kappa*phi) makes the quadratic
        // coefficient's closed form 0/0 and is excluded by assumption.
        const double bal = std::sqrt(kappa * phi);
        if (bal > 0.0 && std::abs(varrho - bal) <= 1e-12 * bal)
            throw config_error("CjProblem: varrho must differ from sqrt(kappa*phi) = " +
                               std::to_string(bal));
    }
};

// Precomputed coefficient functions of the quadratic value-function ansatz.
// Three regimes:
//   phi > 0 (any varrho):   v2 = sqrt(kappa phi) (E + zeta)/(E - zeta),
//                           E = e^{-2 beta (T-t)}, beta = sqrt(phi/kappa),
//                           zeta = (varrho + sqrt(kappa phi))/(varrho - sqrt(kappa phi))
//   phi = 0, varrho > 0:    v2 = -kappa varrho / (kappa + varrho (T-t))
//   phi = 0, varrho = 0:    v2 = 0
// All forms solve  dv2/dt + v2^2/kappa - phi = 0  with v2(T) = -varrho.
// v2 <= 0 throughout and no singularity occurs on [0, T].
class CjCoefficients {
  public:
    explicit CjCoefficients(const CjProblem& p);

    double zeta() const { return zeta_; }
    double beta() const { return beta_; }

    // Quadratic coefficient v2(t), 0 <= t <= T.
    double v2(double t) const;

    // Analytic antiderivative integral int_t^s v2(u) du, t <= s.
    double int_v2(double t, double s) const;

    // Growth factor Phi(t,s) = exp((1/kappa) int_t^s v2), in a form immune to
    // overflow for large beta*(T-t); Phi(t,t) = 1 and 0 < Phi <= 1.
    double growth(double t, double s) const;

    // h(t) = int_t^T e^{-gamma (s-t)} Phi(t,s) ds: the deterministic factor
    // multiplying the signal in v1. Adaptive quadrature except where the
    // integral is elementary.
    double signal_factor(double t) const;

    // v1(t, iota) = iota * h(t)
    double v1(double t, double iota) const { return iota * signal_factor(t); }

    // v0(t, iota) = (1/4 kappa) int_t^T h(s)^2 E[I_s^2 | I_t = iota] ds,
    // using the OU second moment iota^2 e^{-2 gamma (s-t)}
    // + sigma^2 (1 - e^{-2 gamma (s-t)})/(2 gamma).
    double v0(double t, double iota) const;

    // varrho -> infinity (hard fuel constraint) limits: zeta -> 1, where
    //   v2_fuel(t) = -sqrt(kappa phi) coth(beta (T-t))   (phi > 0)
    //              = -kappa / (T-t)                       (phi = 0)
    // which blows up toward T exactly fast enough to force X(T) = 0.
    double v2_fuel(double t) const;
    double growth_fuel(double t, double s) const;    // sinh(beta(T-s))/sinh(beta(T-t))
    double signal_factor_fuel(double t) const;

    double horizon() const { return T_; }

  private:
    void require_in_horizon(double t, const char* who) const;

    double kappa_, phi_, varrho_, T_, gamma_, sigma_;
    double beta_ = 0.0, zeta_ = 0.0, sqkf_ = 0.0;
    enum class Regime { general, terminal_only, no_penalties } regime_;
};

// Free-function views of the coefficient machinery.
double v2_at(const CjProblem& p, double t);
double v1_at(const CjProblem& p, double t, double iota);
double v0_at(const CjProblem& p, double t, double iota);

// Feedback selling rate r*(t, x, iota) = -(1/2 kappa)(2 v2(t) x + v1(t, iota));
// inventory follows dX/dt = -r*. With phi = varrho = 0 this reduces to the
// pure signal-chasing rate -iota_t (1 - e^{-gamma (T-t)}) / (2 kappa gamma).
double optimal_rate(const CjProblem& p, double t, double x, double iota);

// Rate in the varrho -> infinity limit (forced full liquidation). Singular at
// t == T, which is rejected.
double fuel_limit_rate(const CjProblem& p, double t, double x, double iota);

// v-part of the value function: v0(t,iota) + x v1(t,iota) + x^2 v2(t).
// This is the quantity surfaces are plotted from (value net of cash + x*price).
double value_surface(const CjProblem& p, double t, double iota, double x);

}  // namespace sigexec
