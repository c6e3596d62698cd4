#pragma once

#include <cmath>
#include <cstdlib>
#include <vector>

namespace sigexec::detail {

// int_0^U t^p e^{a t + b} dt, exact up to rounding for any magnitudes.
//
// Small |a U| uses the series e^b U^{p+1} sum_k (aU)^k / (k! (p+k+1)), which
// has no cancellation; otherwise the upward recurrence
//   I_0 = (e^{aU+b} - e^b)/a,   I_k = (U^k e^{aU+b} - k I_{k-1})/a
// is used. Exponents are kept paired with their offsets (a*t + b evaluated
// together) so terms like e^{rho(t-T)} with rho*T in the hundreds neither
// overflow nor turn into 0 * inf.
inline double exp_poly_integral(int p, double a, double b, double U) {
    if (U == 0.0) return 0.0;
    const double z = a * U;
    if (std::abs(z) < 0.5) {
        double coeff = 1.0;  // z^k / k!
        double sum = 0.0;
        for (int k = 0; k < 26; ++k) {
            sum += coeff / (k + p + 1);
            coeff *= z / (k + 1);
        }
        return std::exp(b) * std::pow(U, p + 1) * sum;
    }
    const double top = std::exp(z + b);   // e^{aU+b}
    const double bottom = std::exp(b);
    double integral = (top - bottom) / a;
    double upow = 1.0;
    for (int k = 1; k <= p; ++k) {
        upow *= U;
        integral = (upow * top - k * integral) / a;
    }
    return integral;
}

// One term c * t^p * e^{a t + b}.
struct ExpTerm {
    double c = 0.0;
    int p = 0;
    double a = 0.0;
    double b = 0.0;
};

// A finite sum of ExpTerm. Closed under addition, scaling and product, with
// pointwise evaluation and exact integration over [0, U]. The closed-form
// strategy density, the kernel's impact response, and the integrated signal
// mean all live in this class, so execution costs and optimality residuals
// come out analytically instead of through quadrature.
class ExpSum {
  public:
    ExpSum() = default;

    ExpSum& add(double c, int p, double a, double b = 0.0) {
        if (c != 0.0) terms_.push_back({c, p, a, b});
        return *this;
    }

    ExpSum& add(const ExpSum& other) {
        terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
        return *this;
    }

    ExpSum scaled(double s) const {
        ExpSum out;
        if (s == 0.0) return out;
        out.terms_.reserve(terms_.size());
        for (const auto& t : terms_) out.terms_.push_back({t.c * s, t.p, t.a, t.b});
        return out;
    }

    ExpSum times(const ExpSum& other) const {
        ExpSum out;
        out.terms_.reserve(terms_.size() * other.terms_.size());
        for (const auto& u : terms_)
            for (const auto& v : other.terms_)
                out.terms_.push_back({u.c * v.c, u.p + v.p, u.a + v.a, u.b + v.b});
        return out;
    }

    double eval(double t) const {
        double sum = 0.0;
        for (const auto& term : terms_) {
            double tp = 1.0;
            for (int k = 0; k < term.p; ++k) tp *= t;
            sum += term.c * tp * std::exp(term.a * t + term.b);
        }
        return sum;
    }

    // int_0^upper of the sum.
    double integral(double upper) const {
        double sum = 0.0;
        for (const auto& term : terms_)
            sum += term.c * exp_poly_integral(term.p, term.a, term.b, upper);
        return sum;
    }

    const std::vector<ExpTerm>& terms() const { return terms_; }

  private:
    std::vector<ExpTerm> terms_;
};

}  // namespace sigexec::detail
