// Command-line front end. Every subcommand reads parameters from built-in
// defaults, then an optional JSON config file, then explicit flags (flags
// win), runs the requested computation, and writes its outputs plus a
// metadata.json into --out. Re-running any command with
// --config <out>/metadata.json reproduces the output files byte for byte.
#include <CLI11.hpp>
#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "sigexec/common.hpp"
#include "sigexec/csv.hpp"
#include "sigexec/estimation.hpp"
#include "sigexec/gss.hpp"
#include "sigexec/montecarlo.hpp"
#include "sigexec/oracle.hpp"

using json = nlohmann::ordered_json;
using namespace sigexec;

namespace {

// ---- parameter plumbing ----------------------------------------------------

json load_config_file(const std::string& path, const std::string& command) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error("cannot open config: " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw io_error(path + ": " + e.what());
    }
    if (!doc.is_object()) {
        throw config_error(path + ": top level must be an object");
    }
    // Accept a previously emitted metadata file as a config.
    if (doc.contains("parameters")) {
        if (doc.contains("command") && doc["command"] != command) {
            throw config_error(path + ": config belongs to command '" +
                               doc["command"].get<std::string>() + "', not '" +
                               command + "'");
        }
        doc = doc["parameters"];
        if (!doc.is_object()) {
            throw config_error(path + ": \"parameters\" must be an object");
        }
    }
    return doc;
}

double get_num(const json& p, const char* key) {
    const auto& v = p.at(key);
    if (!v.is_number()) {
        throw config_error(std::string("parameter '") + key +
                           "' must be a number");
    }
    return v.get<double>();
}

std::int64_t get_int(const json& p, const char* key) {
    const auto& v = p.at(key);
    if (v.is_number_integer() || v.is_number_unsigned()) {
        return v.get<std::int64_t>();
    }
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::nearbyint(d) == d && std::abs(d) < 9.0e18) {
            return static_cast<std::int64_t>(d);
        }
    }
    throw config_error(std::string("parameter '") + key +
                       "' must be an integer");
}

bool get_bool(const json& p, const char* key) {
    const auto& v = p.at(key);
    if (!v.is_boolean()) {
        throw config_error(std::string("parameter '") + key +
                           "' must be a boolean");
    }
    return v.get<bool>();
}

std::string get_str(const json& p, const char* key) {
    const auto& v = p.at(key);
    if (!v.is_string()) {
        throw config_error(std::string("parameter '") + key +
                           "' must be a string");
    }
    return v.get<std::string>();
}

std::vector<double> get_num_array(const json& p, const char* key) {
    const auto& v = p.at(key);
    if (!v.is_array()) {
        throw config_error(std::string("parameter '") + key +
                           "' must be an array of numbers");
    }
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) {
            throw config_error(std::string("parameter '") + key +
                               "' must contain only numbers");
        }
        out.push_back(e.get<double>());
    }
    return out;
}

std::vector<std::int64_t> get_int_array(const json& p, const char* key) {
    const auto& v = p.at(key);
    if (!v.is_array()) {
        throw config_error(std::string("parameter '") + key +
                           "' must be an array of integers");
    }
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        json one{{key, v[i]}};
        out.push_back(get_int(one, key));
    }
    return out;
}

std::vector<std::string> get_str_array(const json& p, const char* key) {
    const auto& v = p.at(key);
    if (!v.is_array()) {
        throw config_error(std::string("parameter '") + key +
                           "' must be an array of strings");
    }
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) {
            throw config_error(std::string("parameter '") + key +
                               "' must contain only strings");
        }
        out.push_back(e.get<std::string>());
    }
    return out;
}

// Binds CLI flags to keys of a defaults object. finalize() layers the three
// sources: defaults, then the config file, then any flag the user passed.
class ParamBinder {
  public:
    ParamBinder(CLI::App* cmd, json defaults)
        : cmd_(cmd), defaults_(std::move(defaults)) {
        cmd->add_option("--config", config_path_,
                        "JSON parameter file (a metadata.json also works)");
        cmd->add_option("--out", out_dir_, "output directory")
            ->capture_default_str();
    }

    void number(const std::string& flag, const std::string& key,
                const std::string& desc) {
        auto store = std::make_shared<double>();
        auto* opt = cmd_->add_option(flag, *store, desc);
        appliers_.push_back([store, opt, key](json& p) {
            if (opt->count() > 0) p[key] = *store;
        });
    }

    void integer(const std::string& flag, const std::string& key,
                 const std::string& desc) {
        auto store = std::make_shared<std::int64_t>();
        auto* opt = cmd_->add_option(flag, *store, desc);
        appliers_.push_back([store, opt, key](json& p) {
            if (opt->count() > 0) p[key] = *store;
        });
    }

    void toggle(const std::string& flag, const std::string& key,
                const std::string& desc) {
        auto store = std::make_shared<bool>();
        auto* opt = cmd_->add_flag(flag, *store, desc);
        appliers_.push_back([store, opt, key](json& p) {
            if (opt->count() > 0) p[key] = *store;
        });
    }

    void text(const std::string& flag, const std::string& key,
              const std::string& desc) {
        auto store = std::make_shared<std::string>();
        auto* opt = cmd_->add_option(flag, *store, desc);
        appliers_.push_back([store, opt, key](json& p) {
            if (opt->count() > 0) p[key] = *store;
        });
    }

    void numbers(const std::string& flag, const std::string& key,
                 const std::string& desc) {
        auto store = std::make_shared<std::vector<double>>();
        auto* opt = cmd_->add_option(flag, *store, desc)->delimiter(',');
        appliers_.push_back([store, opt, key](json& p) {
            if (opt->count() > 0) p[key] = *store;
        });
    }

    void integers(const std::string& flag, const std::string& key,
                  const std::string& desc) {
        auto store = std::make_shared<std::vector<std::int64_t>>();
        auto* opt = cmd_->add_option(flag, *store, desc)->delimiter(',');
        appliers_.push_back([store, opt, key](json& p) {
            if (opt->count() > 0) p[key] = *store;
        });
    }

    void texts(const std::string& flag, const std::string& key,
               const std::string& desc) {
        auto store = std::make_shared<std::vector<std::string>>();
        auto* opt = cmd_->add_option(flag, *store, desc)->delimiter(',');
        appliers_.push_back([store, opt, key](json& p) {
            if (opt->count() > 0) p[key] = *store;
        });
    }

    json finalize(const std::string& command) const {
        json p = defaults_;
        if (!config_path_.empty()) {
            const json file = load_config_file(config_path_, command);
            for (auto it = file.begin(); it != file.end(); ++it) {
                if (!p.contains(it.key())) {
                    throw config_error(config_path_ + ": unknown parameter '" +
                                       it.key() + "' for " + command);
                }
                p[it.key()] = it.value();
            }
        }
        for (const auto& apply : appliers_) {
            apply(p);
        }
        return p;
    }

    const std::string& out_dir() const { return out_dir_; }

  private:
    CLI::App* cmd_;
    json defaults_;
    std::string config_path_;
    std::string out_dir_ = ".";
    std::vector<std::function<void(json&)>> appliers_;
};

// ---- output plumbing -------------------------------------------------------

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw io_error("cannot create output directory '" + dir +
                       "': " + ec.message());
    }
}

void write_metadata(const std::string& dir, const std::string& command,
                    const json& params) {
    json doc;
    doc["command"] = command;
    doc["version"] = kVersion;
    doc["parameters"] = params;
    const std::string path = join_path(dir, "metadata.json");
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw io_error("cannot open for writing: " + path);
    }
    out << doc.dump(2) << "\n";
    if (!out) {
        throw io_error("write failed: " + path);
    }
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] =
            lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    }
    return out;
}

std::string fmt(double v) { return csv::format_double(v); }

// ---- subcommand bodies -----------------------------------------------------

void run_gss_solve(const json& P, const std::string& out) {
    const double x0 = get_num(P, "x0");
    const double T = get_num(P, "T");
    const double kappa = get_num(P, "kappa");
    const double gamma = get_num(P, "gamma");
    const auto iotas = get_num_array(P, "iotas");
    const auto rhos = get_num_array(P, "rhos");
    const int resolution = static_cast<int>(get_int(P, "resolution"));
    const bool verify = get_bool(P, "verify");
    const int verify_n = static_cast<int>(get_int(P, "verify_n"));
    if (iotas.empty() || rhos.empty()) {
        throw config_error("gss-solve: iotas and rhos must be nonempty");
    }
    if (resolution < 2) {
        throw config_error("gss-solve: resolution must be at least 2");
    }
    ensure_dir(out);

    for (const double rho : rhos) {
        for (const double iota : iotas) {
            GssProblem p;
            p.x0 = x0;
            p.T = T;
            p.signal = OuSignal{gamma, 0.0, iota};
            p.kernel = ExpKernel{kappa, rho};
            p.validate();
            const auto [c, m] = solve_closed_form(p);
            const auto grid = linspace(0.0, T, resolution);
            const auto [lhs_mean, lhs_dev] =
                check_optimality_condition(p, m, grid);

            csv::Table t;
            t.comments = {"iota: " + fmt(iota),
                          "rho: " + fmt(rho),
                          "A: " + fmt(c.A),
                          "B: " + fmt(c.B),
                          "C: " + fmt(c.C),
                          "D: " + fmt(c.D),
                          "lambda: " + fmt(c.lambda),
                          "optimality_mean: " + fmt(lhs_mean),
                          "optimality_max_deviation: " + fmt(lhs_dev)};
            t.columns = {"t", "inventory", "rate", "atom_flag"};
            const std::size_t last = grid.size() - 1;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double ti = grid[i];
                double inv = 0.0;
                double flag = 0.0;
                if (i == 0) {
                    inv = x0 + m.atom0;
                    flag = m.atom0 != 0.0 ? 1.0 : 0.0;
                } else if (i == last) {
                    inv = inventory_at(m, T) + m.atomT;
                    flag = m.atomT != 0.0 ? 1.0 : 0.0;
                } else {
                    inv = inventory_at(m, ti);
                }
                t.rows.push_back({ti, inv, density_rate(m, ti), flag});
            }
            char name[64];
            std::snprintf(name, sizeof(name), "strategy_iota%g_rho%g.csv",
                          iota, rho);
            const std::string path = join_path(out, name);
            csv::write_table(path, t);

            if (verify) {
                const auto rows = convergence_study(p, {verify_n});
                csv::append_comments(
                    path, {"verify_n: " + std::to_string(verify_n),
                           "verify_cost_gap_rel: " + fmt(rows[0].cost_gap),
                           "verify_inventory_sup_gap: " + fmt(rows[0].sup_gap),
                           "verify_lambda_gap_rel: " + fmt(rows[0].lambda_gap)});
            }
        }
    }
    write_metadata(out, "gss-solve", P);
}

void run_gss_oracle(const json& P, const std::string& out) {
    GssProblem p;
    p.x0 = get_num(P, "x0");
    p.T = get_num(P, "T");
    p.signal = OuSignal{get_num(P, "gamma"), 0.0, get_num(P, "iota")};
    p.kernel = ExpKernel{get_num(P, "kappa"), get_num(P, "rho")};
    p.phi = get_num(P, "phi");
    p.validate();
    const int n = static_cast<int>(get_int(P, "n"));
    const auto n_list = get_int_array(P, "n_list");
    ensure_dir(out);

    const auto sol = solve_qp(build_qp(p, n));
    csv::Table t;
    t.comments = {"n: " + std::to_string(n),
                  "kkt_multiplier: " + fmt(sol.lambda),
                  "kkt_residual: " + fmt(sol.kkt_residual),
                  "cost: " + fmt(cost(p, sol.strategy)),
                  "fuel_residual: " + fmt(sol.strategy.fuel_residual())};
    if (p.phi == 0.0) {
        // Sign mapping to the closed form's fuel multiplier.
        t.comments.push_back("lambda: " + fmt(-sol.lambda));
    }
    t.columns = {"t", "increment", "inventory"};
    const auto inv = sol.strategy.inventory_after();
    for (std::size_t i = 0; i < sol.strategy.grid.size(); ++i) {
        t.rows.push_back({sol.strategy.grid[i],
                          sol.strategy.increments[static_cast<long>(i)],
                          inv[i]});
    }
    csv::write_table(join_path(out, "oracle.csv"), t);

    if (!n_list.empty()) {
        std::vector<int> sizes;
        for (const auto v : n_list) {
            sizes.push_back(static_cast<int>(v));
        }
        const auto rows = convergence_study(p, sizes);
        csv::Table conv;
        conv.columns = {"n", "cost_gap_rel", "inventory_sup_gap",
                        "lambda_gap_rel"};
        for (const auto& r : rows) {
            conv.rows.push_back({static_cast<double>(r.n), r.cost_gap,
                                 r.sup_gap, r.lambda_gap});
        }
        csv::write_table(join_path(out, "convergence.csv"), conv);
    }
    write_metadata(out, "gss-oracle", P);
}

ScenarioSpec cj_spec_from(const json& P, bool with_paths) {
    ScenarioSpec spec;
    spec.framework = Framework::cj;
    spec.cj.kappa = get_num(P, "kappa");
    spec.cj.phi = get_num(P, "phi");
    spec.cj.varrho = get_num(P, "varrho");
    spec.cj.T = get_num(P, "T");
    spec.cj.signal.gamma = get_num(P, "gamma");
    spec.cj.signal.sigma = get_num(P, "sigma");
    if (with_paths) {
        spec.cj.x0 = get_num(P, "x0");
        spec.cj.signal.iota = get_num(P, "iota");
        spec.n_paths = static_cast<int>(get_int(P, "n_paths"));
        spec.master_seed = static_cast<std::uint64_t>(get_int(P, "seed"));
        spec.resolution = static_cast<int>(get_int(P, "resolution"));
        spec.integration_steps =
            static_cast<int>(get_int(P, "integration_steps"));
    } else {
        spec.surface.iota_lo = get_num(P, "iota_lo");
        spec.surface.iota_hi = get_num(P, "iota_hi");
        spec.surface.x_lo = get_num(P, "x_lo");
        spec.surface.x_hi = get_num(P, "x_hi");
        spec.surface.resolution = static_cast<int>(get_int(P, "resolution"));
    }
    spec.validate();
    return spec;
}

void run_cj_simulate(const json& P, const std::string& out) {
    const ScenarioSpec spec = cj_spec_from(P, true);
    ensure_dir(out);
    const TrajectoryBundle b = run_cj_paths(spec);

    csv::Table traj;
    traj.comments = {"paths: " + std::to_string(spec.n_paths),
                     "master_seed: " + std::to_string(spec.master_seed),
                     "steps_per_cell: " + std::to_string(b.steps_per_cell),
                     "path_id 0 is the noise-free reference"};
    traj.columns = {"path_id", "t", "inventory", "rate", "signal"};
    for (std::size_t r = 0; r < b.inventory.size(); ++r) {
        for (std::size_t i = 0; i < b.grid.size(); ++i) {
            traj.rows.push_back({static_cast<double>(r), b.grid[i],
                                 b.inventory[r][i], b.rate[r][i],
                                 b.signal[r][i]});
        }
    }
    csv::write_table(join_path(out, "trajectories.csv"), traj);

    csv::Table q;
    q.comments = {"paths: " + std::to_string(spec.n_paths),
                  "master_seed: " + std::to_string(spec.master_seed)};
    q.columns = {"t", "q10", "q25", "q50", "q75", "q90", "mean"};
    for (std::size_t i = 0; i < b.grid.size(); ++i) {
        q.rows.push_back({b.grid[i], b.q10[i], b.q25[i], b.q50[i], b.q75[i],
                          b.q90[i], b.mean[i]});
    }
    csv::write_table(join_path(out, "quantiles.csv"), q);
    write_metadata(out, "cj-simulate", P);
}

void run_cj_surface(const json& P, const std::string& out) {
    const ScenarioSpec spec = cj_spec_from(P, false);
    ensure_dir(out);
    const auto points = value_surface_grid(spec);
    csv::Table t;
    t.comments = {"resolution: " + std::to_string(spec.surface.resolution),
                  "t: 0"};
    t.columns = {"iota", "x", "value"};
    for (const auto& pt : points) {
        t.rows.push_back({pt.iota, pt.x, pt.value});
    }
    csv::write_table(join_path(out, "surface.csv"), t);
    write_metadata(out, "cj-surface", P);
}

void run_estimate(const json& P, const std::string& out) {
    const std::string input = get_str(P, "input");
    if (input.empty()) {
        throw config_error("estimate: input CSV path is required");
    }
    const auto lags = get_int_array(P, "lags");
    const int stride = static_cast<int>(get_int(P, "stride"));
    const bool with_intercept = get_bool(P, "with_intercept");
    RateConfig rc;
    rc.interval_seconds = get_num(P, "interval_seconds");
    rc.trades_per_interval =
        static_cast<int>(get_int(P, "trades_per_interval"));
    rc.n_bins = static_cast<int>(get_int(P, "n_bins"));
    rc.drop_zero_ties = get_bool(P, "drop_zero_ties");
    const auto classes = get_str_array(P, "rate_classes");
    const auto horizons = get_int_array(P, "horizons");

    const auto tape = csv::read_trades(input);
    validate_trades(tape);
    ensure_dir(out);

    std::vector<double> series;
    series.reserve(tape.size());
    for (const auto& tr : tape) {
        series.push_back(imbalance(tr.best_bid_qty, tr.best_ask_qty));
    }

    csv::Table fits;
    fits.comments = {"input: " + input,
                     "n_samples: " + std::to_string(series.size()),
                     "stride 0 uses the lag itself"};
    fits.columns = {"dn",       "n_obs",    "a_dn",     "gamma_hat",
                    "sigma_hat", "gamma_se", "sigma_se", "near_unit_root"};
    for (const auto lag : lags) {
        const int dn = static_cast<int>(lag);
        const OuFit f =
            fit_ou(series, dn, stride > 0 ? stride : dn, with_intercept);
        fits.rows.push_back({static_cast<double>(f.dn),
                             static_cast<double>(f.n_obs), f.a_dn, f.gamma_hat,
                             f.sigma_hat, f.gamma_se, f.sigma_se,
                             f.near_unit_root ? 1.0 : 0.0});
    }
    csv::write_table(join_path(out, "oufit.csv"), fits);

    const KappaEstimate k = estimate_kappa(tape);
    csv::Table kt;
    kt.comments = {"input: " + input};
    kt.columns = {"kappa_hat", "avg_spread", "normalized", "n_trades"};
    kt.rows.push_back({k.kappa_hat, k.avg_spread, k.normalized,
                       static_cast<double>(k.n_trades)});
    csv::write_table(join_path(out, "kappa.csv"), kt);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& cname : classes) {
        const ParticipantClass cls = csv::class_from_name(cname);
        const ConditionedRates r = conditioned_rates(tape, cls, rc);
        csv::Table rt;
        rt.comments = {"participant_class: " + cname,
                       "empty cells print as nan"};
        rt.columns = {"level_index", "level",      "populated_intervals",
                      "r_plus",      "r_minus",    "r_hat_plus",
                      "r_hat_minus"};
        for (std::size_t l = 0; l < r.levels.size(); ++l) {
            rt.rows.push_back({static_cast<double>(l), r.levels[l],
                               static_cast<double>(r.populated_intervals[l]),
                               r.r_plus[l].value_or(nan),
                               r.r_minus[l].value_or(nan),
                               r.r_hat_plus[l].value_or(nan),
                               r.r_hat_minus[l].value_or(nan)});
        }
        std::string lower = cname;
        for (auto& ch : lower) {
            ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        }
        csv::write_table(join_path(out, "rates_" + lower + ".csv"), rt);
    }

    if (!horizons.empty()) {
        csv::Table mt;
        mt.comments = {"input: " + input,
                       "forward mid move in spreads regressed on imbalance"};
        mt.columns = {"horizon", "slope",      "intercept", "r_squared",
                      "slope_se", "avg_spread", "n_obs"};
        for (const auto h : horizons) {
            const MoveRegression mr =
                price_move_regression(tape, static_cast<int>(h));
            mt.rows.push_back({static_cast<double>(h), mr.slope, mr.intercept,
                               mr.r_squared, mr.slope_se, mr.avg_spread,
                               static_cast<double>(mr.n_obs)});
        }
        csv::write_table(join_path(out, "moves.csv"), mt);
    }
    write_metadata(out, "estimate", P);
}

void run_synth_data(const json& P, const std::string& out) {
    SynthMarketConfig cfg;
    cfg.n_trades = static_cast<std::size_t>(get_int(P, "n_trades"));
    cfg.seed = static_cast<std::uint64_t>(get_int(P, "seed"));
    cfg.trades_per_second = get_num(P, "trades_per_second");
    cfg.q_total = get_num(P, "q_total");
    cfg.spread = get_num(P, "spread");
    cfg.kappa = get_num(P, "kappa");
    cfg.mid_noise = get_num(P, "mid_noise");
    cfg.imb_a = get_num(P, "imb_a");
    cfg.imb_innovation = get_num(P, "imb_innovation");
    cfg.p0 = get_num(P, "p0");
    cfg.w_follower = get_num(P, "w_follower");
    cfg.w_blind = get_num(P, "w_blind");
    cfg.w_contrarian = get_num(P, "w_contrarian");
    cfg.chi = get_num(P, "chi");
    ensure_dir(out);
    const auto tape = synth_market(cfg);
    csv::write_trades(join_path(out, "trades.csv"), tape);
    write_metadata(out, "synth-data", P);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"optimal execution under a decaying predictive signal"};
    app.require_subcommand(1);

    // gss-solve -------------------------------------------------------------
    auto* solve = app.add_subcommand(
        "gss-solve", "closed-form optimal schedule under decaying impact");
    auto solve_b = std::make_shared<ParamBinder>(
        solve, json{{"x0", 10.0},
                    {"T", 10.0},
                    {"kappa", 0.1},
                    {"gamma", 0.9},
                    {"iotas", json::array({0.0})},
                    {"rhos", json::array({1.0})},
                    {"resolution", 101},
                    {"verify", false},
                    {"verify_n", 2000}});
    solve_b->number("--x0", "x0", "initial inventory");
    solve_b->number("--T", "T", "horizon");
    solve_b->number("--kappa", "kappa", "impact scale");
    solve_b->number("--gamma", "gamma", "signal decay rate");
    solve_b->numbers("--iotas", "iotas", "initial signal values (one CSV per value)");
    solve_b->numbers("--rhos", "rhos", "impact decay rates (one CSV per value)");
    solve_b->integer("--resolution", "resolution", "output grid nodes");
    solve_b->toggle("--verify,!--no-verify", "verify",
                    "append a grid-solver gap report to each CSV");
    solve_b->integer("--verify-n", "verify_n", "grid intervals for --verify");
    solve->callback([solve_b] {
        run_gss_solve(solve_b->finalize("gss-solve"), solve_b->out_dir());
    });

    // gss-oracle ------------------------------------------------------------
    auto* oracle = app.add_subcommand(
        "gss-oracle", "finite-grid quadratic-program solver and refinement study");
    auto oracle_b = std::make_shared<ParamBinder>(
        oracle, json{{"x0", 10.0},
                     {"T", 10.0},
                     {"kappa", 0.1},
                     {"rho", 1.0},
                     {"gamma", 0.9},
                     {"iota", 0.0},
                     {"phi", 0.0},
                     {"n", 500},
                     {"n_list", json::array()}});
    oracle_b->number("--x0", "x0", "initial inventory");
    oracle_b->number("--T", "T", "horizon");
    oracle_b->number("--kappa", "kappa", "impact scale");
    oracle_b->number("--rho", "rho", "impact decay rate");
    oracle_b->number("--gamma", "gamma", "signal decay rate");
    oracle_b->number("--iota", "iota", "initial signal value");
    oracle_b->number("--phi", "phi", "running inventory penalty");
    oracle_b->integer("--n", "n", "grid intervals for oracle.csv");
    oracle_b->integers("--n-list", "n_list",
                       "grid sizes for convergence.csv (needs phi = 0)");
    oracle->callback([oracle_b] {
        run_gss_oracle(oracle_b->finalize("gss-oracle"), oracle_b->out_dir());
    });

    // cj-simulate -----------------------------------------------------------
    auto* sim = app.add_subcommand(
        "cj-simulate", "feedback-strategy paths under a stochastic signal");
    auto sim_b = std::make_shared<ParamBinder>(
        sim, json{{"kappa", 0.5},
                  {"phi", 0.1},
                  {"varrho", 10.0},
                  {"T", 10.0},
                  {"x0", 10.0},
                  {"gamma", 0.1},
                  {"sigma", 0.1},
                  {"iota", 0.0},
                  {"n_paths", 1000},
                  {"seed", 20260819},
                  {"resolution", 101},
                  {"integration_steps", 1000}});
    sim_b->number("--kappa", "kappa", "instantaneous impact scale");
    sim_b->number("--phi", "phi", "running inventory penalty");
    sim_b->number("--varrho", "varrho", "terminal inventory penalty");
    sim_b->number("--T", "T", "horizon");
    sim_b->number("--x0", "x0", "initial inventory");
    sim_b->number("--gamma", "gamma", "signal decay rate");
    sim_b->number("--sigma", "sigma", "signal volatility");
    sim_b->number("--iota", "iota", "initial signal value");
    sim_b->integer("--n-paths", "n_paths", "stochastic paths");
    sim_b->integer("--seed", "seed", "master seed");
    sim_b->integer("--resolution", "resolution", "output grid nodes");
    sim_b->integer("--integration-steps", "integration_steps",
                   "integrator substeps across the horizon");
    sim->callback([sim_b] {
        run_cj_simulate(sim_b->finalize("cj-simulate"), sim_b->out_dir());
    });

    // cj-surface ------------------------------------------------------------
    auto* surf = app.add_subcommand(
        "cj-surface", "initial value surface over (signal, inventory)");
    auto surf_b = std::make_shared<ParamBinder>(
        surf, json{{"kappa", 0.5},
                   {"phi", 0.1},
                   {"varrho", 10.0},
                   {"T", 10.0},
                   {"gamma", 0.1},
                   {"sigma", 0.1},
                   {"iota_lo", -0.5},
                   {"iota_hi", 0.5},
                   {"x_lo", 5.0},
                   {"x_hi", 10.0},
                   {"resolution", 41}});
    surf_b->number("--kappa", "kappa", "instantaneous impact scale");
    surf_b->number("--phi", "phi", "running inventory penalty");
    surf_b->number("--varrho", "varrho", "terminal inventory penalty");
    surf_b->number("--T", "T", "horizon");
    surf_b->number("--gamma", "gamma", "signal decay rate");
    surf_b->number("--sigma", "sigma", "signal volatility");
    surf_b->number("--iota-lo", "iota_lo", "signal window lower edge");
    surf_b->number("--iota-hi", "iota_hi", "signal window upper edge");
    surf_b->number("--x-lo", "x_lo", "inventory window lower edge");
    surf_b->number("--x-hi", "x_hi", "inventory window upper edge");
    surf_b->integer("--resolution", "resolution", "grid nodes per axis");
    surf->callback([surf_b] {
        run_cj_surface(surf_b->finalize("cj-surface"), surf_b->out_dir());
    });

    // estimate --------------------------------------------------------------
    auto* est = app.add_subcommand(
        "estimate", "fit signal, impact, and rate profiles from a trade tape");
    auto est_b = std::make_shared<ParamBinder>(
        est, json{{"input", ""},
                  {"lags", json::array({3, 5, 7, 10, 100})},
                  {"stride", 0},
                  {"with_intercept", false},
                  {"interval_seconds", 600.0},
                  {"trades_per_interval", 0},
                  {"n_bins", 21},
                  {"drop_zero_ties", false},
                  {"rate_classes", json::array({"HFPT", "IB", "HFMM"})},
                  {"horizons", json::array()}});
    est_b->text("--input", "input", "trade tape CSV");
    est_b->integers("--lags", "lags", "regression lags in trades");
    est_b->integer("--stride", "stride", "pair stride (0 = the lag itself)");
    est_b->toggle("--with-intercept,!--no-intercept", "with_intercept",
                  "include an intercept in the signal regression");
    est_b->number("--interval-seconds", "interval_seconds",
                  "calendar partition width");
    est_b->integer("--trades-per-interval", "trades_per_interval",
                   "> 0 switches to the event-count clock");
    est_b->integer("--n-bins", "n_bins", "imbalance bins on [-1, 1] (odd)");
    est_b->toggle("--drop-zero-ties,!--keep-zero-ties", "drop_zero_ties",
                  "drop trades at exactly zero imbalance");
    est_b->texts("--rate-classes", "rate_classes",
                 "participant classes to profile");
    est_b->integers("--horizons", "horizons",
                    "forward-move horizons (empty skips moves.csv)");
    est->callback([est_b] {
        run_estimate(est_b->finalize("estimate"), est_b->out_dir());
    });

    // synth-data ------------------------------------------------------------
    auto* synth = app.add_subcommand(
        "synth-data", "generate a synthetic trade tape with known parameters");
    auto synth_b = std::make_shared<ParamBinder>(
        synth, json{{"n_trades", 100000},
                    {"seed", 20260819},
                    {"trades_per_second", 1.0},
                    {"q_total", 400.0},
                    {"spread", 0.01},
                    {"kappa", 0.001},
                    {"mid_noise", 0.005},
                    {"imb_a", 0.995},
                    {"imb_innovation", 0.03},
                    {"p0", 100.0},
                    {"w_follower", 0.4},
                    {"w_blind", 0.4},
                    {"w_contrarian", 0.2},
                    {"chi", 0.8}});
    synth_b->integer("--n-trades", "n_trades", "tape length");
    synth_b->integer("--seed", "seed", "generator seed");
    synth_b->number("--trades-per-second", "trades_per_second", "event rate");
    synth_b->number("--q-total", "q_total", "combined top-of-book depth");
    synth_b->number("--spread", "spread", "quoted spread");
    synth_b->number("--kappa", "kappa", "permanent mid move per trade");
    synth_b->number("--mid-noise", "mid_noise", "idiosyncratic mid move sd");
    synth_b->number("--imb-a", "imb_a", "per-trade imbalance AR coefficient");
    synth_b->number("--imb-innovation", "imb_innovation",
                    "imbalance innovation sd");
    synth_b->number("--p0", "p0", "starting price");
    synth_b->number("--w-follower", "w_follower", "signal-following weight");
    synth_b->number("--w-blind", "w_blind", "signal-blind weight");
    synth_b->number("--w-contrarian", "w_contrarian", "contrarian weight");
    synth_b->number("--chi", "chi", "direction sensitivity");
    synth->callback([synth_b] {
        run_synth_data(synth_b->finalize("synth-data"), synth_b->out_dir());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_code::config;
    } catch (const config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code::config;
    } catch (const numerical_error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return exit_code::numeric;
    } catch (const io_error& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return exit_code::io;
    }
    return 0;
}
