#include "sigexec/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sigexec/common.hpp"
#include "sigexec/rng.hpp"

namespace sigexec {

namespace {

constexpr std::size_t kClassCount = 5;

int direction_of(double signed_qty) {
    if (signed_qty > 0.0) return 1;
    if (signed_qty < 0.0) return -1;
    return 0;
}

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double sse = 0.0;
    double sst = 0.0;
    double sxx = 0.0;  // denominator of the slope variance
    std::size_t dof = 0;
};

OlsFit ols(const std::vector<double>& x, const std::vector<double>& y,
           bool with_intercept) {
    const std::size_t m = x.size();
    OlsFit fit;
    double xbar = 0.0, ybar = 0.0;
    if (with_intercept) {
        for (std::size_t i = 0; i < m; ++i) {
            xbar += x[i];
            ybar += y[i];
        }
        xbar /= static_cast<double>(m);
        ybar /= static_cast<double>(m);
    }
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double xc = x[i] - xbar;
        sxx += xc * xc;
        sxy += xc * (y[i] - ybar);
    }
    if (!(sxx > 0.0)) {
        throw numerical_error("regression: degenerate regressor (no variation)");
    }
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    fit.sxx = sxx;
    fit.dof = m - (with_intercept ? 2 : 1);
    for (std::size_t i = 0; i < m; ++i) {
        const double e = y[i] - fit.intercept - fit.slope * x[i];
        fit.sse += e * e;
        const double yc = y[i] - ybar;
        fit.sst += yc * yc;
    }
    return fit;
}

}  // namespace

void validate_trades(const std::vector<TradeRecord>& trades) {
    for (std::size_t i = 0; i < trades.size(); ++i) {
        const TradeRecord& t = trades[i];
        std::ostringstream msg;
        if (!(t.best_bid_qty >= 0.0) || !(t.best_ask_qty >= 0.0)) {
            msg << "trade " << i << ": negative book quantity";
            throw config_error(msg.str());
        }
        if (!(t.best_bid_qty + t.best_ask_qty > 0.0)) {
            msg << "trade " << i << ": empty book";
            throw config_error(msg.str());
        }
        if (i > 0 && t.timestamp < trades[i - 1].timestamp) {
            msg << "trade " << i << ": timestamps decrease";
            throw config_error(msg.str());
        }
    }
}

double imbalance(double bid_qty, double ask_qty) {
    if (!(bid_qty >= 0.0) || !(ask_qty >= 0.0)) {
        throw config_error("imbalance: book quantities must be nonnegative");
    }
    const double total = bid_qty + ask_qty;
    if (!(total > 0.0)) {
        throw config_error("imbalance: empty book");
    }
    return (bid_qty - ask_qty) / total;
}

OuFit fit_ou(const std::vector<double>& series, int dn, int stride,
             bool with_intercept) {
    if (dn < 1) {
        throw config_error("fit_ou: lag must be at least 1");
    }
    if (stride < 1) {
        throw config_error("fit_ou: stride must be at least 1");
    }
    if (series.size() < 100 * static_cast<std::size_t>(dn)) {
        std::ostringstream msg;
        msg << "fit_ou: series of length " << series.size()
            << " is too short for lag " << dn << " (need at least " << 100 * dn
            << ")";
        throw config_error(msg.str());
    }

    std::vector<double> x, y;
    for (std::size_t n = 0; n + static_cast<std::size_t>(dn) < series.size();
         n += static_cast<std::size_t>(stride)) {
        x.push_back(series[n]);
        y.push_back(series[n + static_cast<std::size_t>(dn)]);
    }
    if (x.size() < 10) {
        throw config_error("fit_ou: stride leaves too few regression pairs");
    }

    const OlsFit base = ols(x, y, with_intercept);

    OuFit fit;
    fit.a_dn = base.slope;
    fit.intercept = base.intercept;
    fit.with_intercept = with_intercept;
    fit.dn = dn;
    fit.stride = stride;
    fit.n_obs = x.size();
    fit.sigma_tilde = std::sqrt(base.sse / static_cast<double>(base.dof));
    fit.gamma_hat = (1.0 - fit.a_dn) / dn;
    fit.sigma_hat = fit.sigma_tilde / std::sqrt(static_cast<double>(dn));
    fit.near_unit_root = fit.a_dn >= 1.0;
    fit.a_se = fit.sigma_tilde / std::sqrt(base.sxx);
    fit.gamma_se = fit.a_se / dn;
    fit.sigma_tilde_se =
        fit.sigma_tilde / std::sqrt(2.0 * static_cast<double>(base.dof));
    fit.sigma_se = fit.sigma_tilde_se / std::sqrt(static_cast<double>(dn));
    return fit;
}

KappaEstimate estimate_kappa(const std::vector<TradeRecord>& trades) {
    if (trades.empty()) {
        throw config_error("estimate_kappa: no trades");
    }
    validate_trades(trades);

    KappaEstimate est;
    double move_acc = 0.0;
    double spread_acc = 0.0;
    for (const TradeRecord& t : trades) {
        move_acc += direction_of(t.signed_qty) * (t.mid_after - t.mid_before);
        spread_acc += std::abs(t.price - t.mid_before);
    }
    const auto n = static_cast<double>(trades.size());
    est.kappa_hat = move_acc / n;
    est.avg_spread = 2.0 * spread_acc / n;
    est.normalized = est.avg_spread > 0.0
                         ? est.kappa_hat / est.avg_spread
                         : std::numeric_limits<double>::quiet_NaN();
    est.n_trades = trades.size();
    return est;
}

ConditionedRates conditioned_rates(const std::vector<TradeRecord>& trades,
                                   ParticipantClass participant,
                                   const RateConfig& cfg) {
    if (trades.empty()) {
        throw config_error("conditioned_rates: no trades");
    }
    if (cfg.n_bins < 3 || cfg.n_bins % 2 == 0) {
        throw config_error(
            "conditioned_rates: bin count must be odd and at least 3 so one "
            "bin straddles zero");
    }
    if (cfg.trades_per_interval == 0 && !(cfg.interval_seconds > 0.0)) {
        throw config_error("conditioned_rates: partition width must be positive");
    }
    validate_trades(trades);

    const int n_levels = (cfg.n_bins + 1) / 2;
    const int center_bin = (cfg.n_bins - 1) / 2;
    const double t0 = trades.front().timestamp;

    const auto interval_of = [&](std::size_t idx) -> std::size_t {
        if (cfg.trades_per_interval > 0) {
            return idx / static_cast<std::size_t>(cfg.trades_per_interval);
        }
        return static_cast<std::size_t>(
            std::floor((trades[idx].timestamp - t0) / cfg.interval_seconds));
    };
    const std::size_t n_intervals = interval_of(trades.size() - 1) + 1;

    // Dense per-cell accumulators: amounts with and against the imbalance
    // sign plus trade counts, per (interval, level, class).
    const std::size_t n_cells =
        n_intervals * static_cast<std::size_t>(n_levels) * kClassCount;
    std::vector<double> amount_with(n_cells, 0.0);
    std::vector<double> amount_against(n_cells, 0.0);
    std::vector<std::size_t> count(n_cells, 0);
    const auto cell = [&](std::size_t interval, int level, std::size_t cls) {
        return (interval * static_cast<std::size_t>(n_levels) +
                static_cast<std::size_t>(level)) *
                   kClassCount +
               cls;
    };

    for (std::size_t i = 0; i < trades.size(); ++i) {
        const TradeRecord& t = trades[i];
        const int eps = direction_of(t.signed_qty);
        if (eps == 0) {
            continue;  // no direction, no amount
        }
        const double imb = imbalance(t.best_bid_qty, t.best_ask_qty);
        int imb_sign;
        if (imb > 0.0) {
            imb_sign = 1;
        } else if (imb < 0.0) {
            imb_sign = -1;
        } else if (cfg.drop_zero_ties) {
            continue;
        } else {
            imb_sign = 1;
        }
        int bin = static_cast<int>(
            std::floor((imb + 1.0) * 0.5 * static_cast<double>(cfg.n_bins)));
        bin = std::clamp(bin, 0, cfg.n_bins - 1);
        const int level = std::abs(bin - center_bin);

        const std::size_t c =
            cell(interval_of(i), level, static_cast<std::size_t>(t.participant));
        const double amount = std::abs(t.signed_qty);
        if (eps == imb_sign) {
            amount_with[c] += amount;
        } else {
            amount_against[c] += amount;
        }
        count[c] += 1;
    }

    ConditionedRates out;
    out.levels.resize(static_cast<std::size_t>(n_levels));
    for (int l = 0; l < n_levels; ++l) {
        out.levels[static_cast<std::size_t>(l)] =
            2.0 * l / static_cast<double>(cfg.n_bins);
    }
    out.r_plus.assign(static_cast<std::size_t>(n_levels), std::nullopt);
    out.r_minus.assign(static_cast<std::size_t>(n_levels), std::nullopt);
    out.r_hat_plus.assign(static_cast<std::size_t>(n_levels), std::nullopt);
    out.r_hat_minus.assign(static_cast<std::size_t>(n_levels), std::nullopt);
    out.populated_intervals.assign(static_cast<std::size_t>(n_levels), 0);
    out.partition_ratio.assign(
        n_intervals, std::vector<double>(
                         static_cast<std::size_t>(n_levels),
                         std::numeric_limits<double>::quiet_NaN()));

    std::vector<double> acc_plus(static_cast<std::size_t>(n_levels), 0.0);
    std::vector<double> acc_minus(static_cast<std::size_t>(n_levels), 0.0);

    for (std::size_t iv = 0; iv < n_intervals; ++iv) {
        for (int l = 0; l < n_levels; ++l) {
            // Per-class mean amounts, then the cross-class normalizer.
            double normalizer = 0.0;
            bool any = false;
            for (std::size_t cls = 0; cls < kClassCount; ++cls) {
                const std::size_t c = cell(iv, l, cls);
                if (count[c] == 0) {
                    continue;
                }
                any = true;
                const auto n = static_cast<double>(count[c]);
                normalizer += amount_with[c] / n + amount_against[c] / n;
            }
            if (!any) {
                continue;
            }
            // Same summation a second time: the partition of traded amount
            // across classes recovers the normalizer bit for bit.
            double partition = 0.0;
            for (std::size_t cls = 0; cls < kClassCount; ++cls) {
                const std::size_t c = cell(iv, l, cls);
                if (count[c] == 0) {
                    continue;
                }
                const auto n = static_cast<double>(count[c]);
                partition += amount_with[c] / n + amount_against[c] / n;
            }
            out.partition_ratio[iv][static_cast<std::size_t>(l)] =
                partition / normalizer;

            const std::size_t cf =
                cell(iv, l, static_cast<std::size_t>(participant));
            if (count[cf] == 0) {
                continue;
            }
            const auto nf = static_cast<double>(count[cf]);
            acc_plus[static_cast<std::size_t>(l)] +=
                (amount_with[cf] / nf) / normalizer;
            acc_minus[static_cast<std::size_t>(l)] +=
                (amount_against[cf] / nf) / normalizer;
            out.populated_intervals[static_cast<std::size_t>(l)] += 1;
        }
    }

    for (int l = 0; l < n_levels; ++l) {
        const auto lu = static_cast<std::size_t>(l);
        if (out.populated_intervals[lu] == 0) {
            continue;
        }
        const auto n = static_cast<double>(out.populated_intervals[lu]);
        out.r_plus[lu] = acc_plus[lu] / n;
        out.r_minus[lu] = acc_minus[lu] / n;
    }
    if (out.r_plus[0].has_value() && *out.r_plus[0] != 0.0) {
        for (int l = 0; l < n_levels; ++l) {
            const auto lu = static_cast<std::size_t>(l);
            if (out.r_plus[lu].has_value()) {
                out.r_hat_plus[lu] = *out.r_plus[lu] / *out.r_plus[0];
            }
        }
    }
    if (out.r_minus[0].has_value() && *out.r_minus[0] != 0.0) {
        for (int l = 0; l < n_levels; ++l) {
            const auto lu = static_cast<std::size_t>(l);
            if (out.r_minus[lu].has_value()) {
                out.r_hat_minus[lu] = *out.r_minus[lu] / *out.r_minus[0];
            }
        }
    }
    return out;
}

MoveRegression price_move_regression(const std::vector<TradeRecord>& trades,
                                     int horizon) {
    if (horizon < 1) {
        throw config_error("price_move_regression: horizon must be at least 1");
    }
    if (trades.size() < static_cast<std::size_t>(horizon) + 3) {
        throw config_error("price_move_regression: not enough trades for the horizon");
    }
    validate_trades(trades);

    double spread_acc = 0.0;
    for (const TradeRecord& t : trades) {
        spread_acc += std::abs(t.price - t.mid_before);
    }
    const double avg_spread =
        2.0 * spread_acc / static_cast<double>(trades.size());
    if (!(avg_spread > 0.0)) {
        throw numerical_error(
            "price_move_regression: zero average spread, cannot normalize");
    }

    const std::size_t m = trades.size() - static_cast<std::size_t>(horizon);
    std::vector<double> x(m), y(m);
    for (std::size_t n = 0; n < m; ++n) {
        x[n] = imbalance(trades[n].best_bid_qty, trades[n].best_ask_qty);
        y[n] = (trades[n + static_cast<std::size_t>(horizon)].mid_before -
                trades[n].mid_before) /
               avg_spread;
    }
    const OlsFit base = ols(x, y, true);

    MoveRegression reg;
    reg.slope = base.slope;
    reg.intercept = base.intercept;
    reg.r_squared = base.sst > 0.0 ? 1.0 - base.sse / base.sst : 1.0;
    reg.slope_se =
        std::sqrt(base.sse / static_cast<double>(base.dof) / base.sxx);
    reg.avg_spread = avg_spread;
    reg.n_obs = m;
    return reg;
}

std::vector<double> synth_ar1(std::size_t n, double a, double innovation_sd,
                              std::uint64_t seed) {
    if (n == 0) {
        throw config_error("synth_ar1: need a positive length");
    }
    Rng rng(seed);
    std::vector<double> out(n);
    double x = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = x;
        x = a * x + innovation_sd * rng.normal();
    }
    return out;
}

std::vector<TradeRecord> synth_market(const SynthMarketConfig& cfg) {
    if (cfg.n_trades == 0) {
        throw config_error("synth_market: need a positive trade count");
    }
    if (!(cfg.q_total > 0.0) || !(cfg.spread >= 0.0) ||
        !(cfg.trades_per_second > 0.0)) {
        throw config_error("synth_market: book depth, spread, and trade rate must be sensible");
    }
    const double w_sum = cfg.w_follower + cfg.w_blind + cfg.w_contrarian;
    if (!(cfg.w_follower >= 0.0) || !(cfg.w_blind >= 0.0) ||
        !(cfg.w_contrarian >= 0.0) || !(w_sum > 0.0)) {
        throw config_error("synth_market: class weights must be nonnegative and not all zero");
    }

    Rng rng(cfg.seed);
    std::vector<TradeRecord> out;
    out.reserve(cfg.n_trades);

    double imb = 0.0;
    double mid = cfg.p0;
    for (std::size_t n = 0; n < cfg.n_trades; ++n) {
        imb = cfg.imb_a * imb + cfg.imb_innovation * rng.normal();
        imb = std::clamp(imb, -0.999, 0.999);

        const double u = rng.uniform() * w_sum;
        ParticipantClass cls;
        double p_buy;
        if (u < cfg.w_follower) {
            cls = ParticipantClass::hfpt;
            p_buy = 0.5 * (1.0 + cfg.chi * imb);
        } else if (u < cfg.w_follower + cfg.w_blind) {
            cls = ParticipantClass::ib;
            p_buy = 0.5;
        } else {
            cls = ParticipantClass::hfmm;
            p_buy = 0.5 * (1.0 - cfg.chi * imb);
        }
        p_buy = std::clamp(p_buy, 0.01, 0.99);
        const int eps = rng.uniform() < p_buy ? 1 : -1;

        TradeRecord t;
        t.timestamp = static_cast<double>(n) / cfg.trades_per_second;
        t.best_bid_qty = 0.5 * cfg.q_total * (1.0 + imb);
        t.best_ask_qty = 0.5 * cfg.q_total * (1.0 - imb);
        t.participant = cls;
        t.signed_qty = static_cast<double>(eps);
        t.mid_before = mid;
        t.price = mid + eps * 0.5 * cfg.spread;
        t.mid_after = mid + cfg.kappa * eps + cfg.mid_noise * rng.normal();
        mid = t.mid_after;
        out.push_back(t);
    }
    return out;
}

}  // namespace sigexec
