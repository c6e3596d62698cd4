#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace sigexec {

enum class ParticipantClass { gib, ib, hfmm, hfpt, other };

struct TradeRecord {
    double timestamp = 0.0;   // seconds; nondecreasing across a tape
    double price = 0.0;
    double signed_qty = 0.0;  // sign gives the trade direction
    double best_bid_qty = 0.0;
    double best_ask_qty = 0.0;
    ParticipantClass participant = ParticipantClass::other;
    double mid_before = 0.0;
    double mid_after = 0.0;
};

// Checks tape invariants: nonnegative book sides, nonempty book at every
// trade, nondecreasing timestamps. Throws config_error naming the first bad
// row.
void validate_trades(const std::vector<TradeRecord>& trades);

// (Q_B - Q_A)/(Q_B + Q_A); rejects an empty book.
double imbalance(double bid_qty, double ask_qty);

// AR(1) identification of a mean-reverting series observed in trade time:
// regressing I_{n+dn} on I_n gives a_dn, and the continuous parameters follow
// as gamma_hat = (1 - a_dn)/dn and sigma_hat = sigma_tilde/sqrt(dn).
struct OuFit {
    double a_dn = 0.0;
    double sigma_tilde = 0.0;  // residual standard deviation
    double gamma_hat = 0.0;
    double sigma_hat = 0.0;
    int dn = 1;
    int stride = 1;
    bool with_intercept = false;
    double intercept = 0.0;
    bool near_unit_root = false;  // a_dn >= 1: gamma_hat is not meaningful
    double a_se = 0.0;            // standard error of a_dn
    double gamma_se = 0.0;        // a_se / dn
    double sigma_tilde_se = 0.0;  // normal-theory se of the residual scale
    double sigma_se = 0.0;        // sigma_tilde_se / sqrt(dn)
    std::size_t n_obs = 0;        // regression pairs used
};

// Fits on pairs (series[n], series[n + dn]) for n = 0, stride, 2 stride, ...
// The default is the through-origin regression; stride 1 uses every
// overlapping pair (note the residuals then overlap too, so the reported
// standard errors are only valid at stride >= dn). Requires
// series.size() >= 100 * dn.
OuFit fit_ou(const std::vector<double>& series, int dn, int stride = 1,
             bool with_intercept = false);

struct KappaEstimate {
    double kappa_hat = 0.0;   // mean of direction * (mid_after - mid_before)
    double avg_spread = 0.0;  // 2 * mean |price - mid_before|
    double normalized = 0.0;  // kappa_hat / avg_spread
    std::size_t n_trades = 0;
};

KappaEstimate estimate_kappa(const std::vector<TradeRecord>& trades);

struct RateConfig {
    double interval_seconds = 600.0;  // calendar partition width
    int trades_per_interval = 0;      // > 0 switches to the event-count clock
    int n_bins = 21;                  // uniform imbalance bins on [-1, 1]
    bool drop_zero_ties = false;      // otherwise Imb == 0 counts as positive
};

// Imbalance-conditioned trading rates for one participant class.
//
// Within each partition interval, trades are bucketed by the magnitude level
// of the prevailing imbalance (bins folded around zero). For a class P and
// level l, R+ is the average traded amount per trade of P in that cell whose
// direction agrees with the imbalance sign, R- the disagreeing counterpart.
// A(interval, l) sums R+ + R- over every class, r+- averages R+-/A over the
// intervals where the cell is populated, and rhat+- rescales by the class's
// own level-zero average. Cells with no trades are missing, not zero.
struct ConditionedRates {
    std::vector<double> levels;  // |imbalance| bin centers; levels[0] == 0
    std::vector<std::optional<double>> r_plus, r_minus;
    std::vector<std::optional<double>> r_hat_plus, r_hat_minus;
    std::vector<std::size_t> populated_intervals;  // per level, focal class
    // Sum over classes of (R+ + R-)/A per (interval, level): exactly 1 where
    // the cell has any trades, NaN where it has none.
    std::vector<std::vector<double>> partition_ratio;
};

ConditionedRates conditioned_rates(const std::vector<TradeRecord>& trades,
                                   ParticipantClass participant,
                                   const RateConfig& cfg = {});

struct MoveRegression {
    double slope = 0.0;  // spread-normalized move per unit of imbalance
    double intercept = 0.0;
    double r_squared = 0.0;
    double slope_se = 0.0;
    double avg_spread = 0.0;
    std::size_t n_obs = 0;
};

// OLS (with intercept) of the forward mid move over `horizon` trades,
// normalized by the average spread, on the imbalance seen at the trade.
MoveRegression price_move_regression(const std::vector<TradeRecord>& trades,
                                     int horizon);

// ---- synthetic data -------------------------------------------------------
// Real tapes of this shape are not redistributable, so every estimator is
// validated on generated streams with known ground truth.

// Plain AR(1): x_{n+1} = a x_n + innovation_sd * xi, x_0 = 0.
std::vector<double> synth_ar1(std::size_t n, double a, double innovation_sd,
                              std::uint64_t seed);

struct SynthMarketConfig {
    std::size_t n_trades = 100000;
    std::uint64_t seed = 20260819;
    double trades_per_second = 1.0;
    double q_total = 400.0;   // combined top-of-book depth
    double spread = 0.01;
    double kappa = 0.001;     // permanent mid move per trade
    double mid_noise = 0.005; // idiosyncratic mid move sd per trade
    double imb_a = 0.995;     // per-trade AR coefficient of the imbalance
    double imb_innovation = 0.03;
    double p0 = 100.0;
    // Class mix: followers trade with the imbalance (tagged hfpt), blind
    // traders ignore it (ib), contrarians lean against it (hfmm).
    double w_follower = 0.4;
    double w_blind = 0.4;
    double w_contrarian = 0.2;
    double chi = 0.8;  // direction sensitivity of followers/contrarians
};

// One trade per event: the book's imbalance follows the AR(1), the trader
// class is drawn from the mix, the direction from the class rule, and the
// mid moves by kappa times the direction plus noise. Prices execute at
// mid +- spread/2.
std::vector<TradeRecord> synth_market(const SynthMarketConfig& cfg);

}  // namespace sigexec
