// End-to-end checks of the command-line binary: output shapes, exit codes,
// and byte-exact reproduction from emitted metadata.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kCli = SIGEXEC_CLI_PATH;
const fs::path kRoot = "/tmp/sigexec_cli_test";

int run_cli(const std::string& args) {
    const int st = std::system((kCli + " " + args).c_str());
    REQUIRE(st != -1);
    REQUIRE(WIFEXITED(st));
    return WEXITSTATUS(st);
}

fs::path fresh(const std::string& name) {
    const fs::path dir = kRoot / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing file: ", path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << body;
}

// Same file names with byte-identical content in both directories.
void check_dirs_equal(const fs::path& a, const fs::path& b) {
    std::vector<std::string> names_a, names_b;
    for (const auto& e : fs::directory_iterator(a)) {
        names_a.push_back(e.path().filename().string());
    }
    for (const auto& e : fs::directory_iterator(b)) {
        names_b.push_back(e.path().filename().string());
    }
    std::sort(names_a.begin(), names_a.end());
    std::sort(names_b.begin(), names_b.end());
    REQUIRE(names_a == names_b);
    for (const auto& n : names_a) {
        CHECK_MESSAGE(slurp(a / n) == slurp(b / n), "file differs: ", n);
    }
}

constexpr const char* kTapeHeader =
    "timestamp,price,signed_qty,best_bid_qty,best_ask_qty,"
    "participant_class,mid_before,mid_after\n";

}  // namespace

TEST_CASE("multi-scenario parameter file yields six scenario files") {
    const auto dir = fresh("six");
    const auto cfg = kRoot / "six_config.json";
    write_file(cfg,
               "{\"x0\": 10, \"T\": 10, \"kappa\": 0.1, \"gamma\": 0.9,\n"
               " \"iotas\": [-0.5, 0, 0.5], \"rhos\": [1.0, 2.5]}\n");
    REQUIRE(run_cli("gss-solve --config " + cfg.string() + " --out " +
                    dir.string()) == 0);
    for (const char* name :
         {"strategy_iota-0.5_rho1.csv", "strategy_iota0_rho1.csv",
          "strategy_iota0.5_rho1.csv", "strategy_iota-0.5_rho2.5.csv",
          "strategy_iota0_rho2.5.csv", "strategy_iota0.5_rho2.5.csv",
          "metadata.json"}) {
        CHECK_MESSAGE(fs::exists(dir / name), "missing ", name);
    }

    // The no-signal scenario carries the classic equal-thirds constants.
    const std::string ow = slurp(dir / "strategy_iota0_rho1.csv");
    CHECK(ow.find("# A: -0.83333333333333337\n") != std::string::npos);
    CHECK(ow.find("# B: 0\n") != std::string::npos);
    CHECK(ow.find("# lambda: -0.16666666666666669\n") != std::string::npos);
    CHECK(ow.find("\n0,9.1666666666666661,-0.83333333333333337,1\n") !=
          std::string::npos);
}

TEST_CASE("verify flag appends a small grid-solver gap report") {
    const auto dir = fresh("verify");
    REQUIRE(run_cli("gss-solve --iotas=-0.5 --rhos=1 --verify --verify-n 400 "
                    "--out " +
                    dir.string()) == 0);
    const std::string body = slurp(dir / "strategy_iota-0.5_rho1.csv");
    const auto pos = body.find("# verify_cost_gap_rel: ");
    REQUIRE(pos != std::string::npos);
    CHECK(body.find("# verify_n: 400\n") != std::string::npos);
    const double gap = std::stod(body.substr(pos + 23));
    CHECK(gap > 0.0);
    CHECK(gap < 1e-3);
}

TEST_CASE("zero volatility replicates the reference path") {
    const auto dir = fresh("quiet");
    REQUIRE(run_cli("cj-simulate --sigma 0 --iota 0.3 --n-paths 3 "
                    "--integration-steps 200 --resolution 21 --out " +
                    dir.string()) == 0);
    std::ifstream in(dir / "trajectories.csv");
    REQUIRE(in.good());
    std::string line;
    std::vector<std::vector<std::string>> blocks(4);
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'p') {
            continue;
        }
        const auto comma = line.find(',');
        const std::size_t id = std::stoul(line.substr(0, comma));
        REQUIRE(id < blocks.size());
        blocks[id].push_back(line.substr(comma + 1));
    }
    REQUIRE(blocks[0].size() == 21);
    for (std::size_t r = 1; r < blocks.size(); ++r) {
        CHECK(blocks[r] == blocks[0]);
    }
}

TEST_CASE("same seed reproduces, different seed does not") {
    const auto a = fresh("seed_a");
    const auto b = fresh("seed_b");
    const auto c = fresh("seed_c");
    const std::string base =
        "cj-simulate --n-paths 5 --integration-steps 100 --resolution 11 ";
    REQUIRE(run_cli(base + "--seed 42 --out " + a.string()) == 0);
    REQUIRE(run_cli(base + "--seed 42 --out " + b.string()) == 0);
    REQUIRE(run_cli(base + "--seed 43 --out " + c.string()) == 0);
    check_dirs_equal(a, b);
    CHECK(slurp(a / "trajectories.csv") != slurp(c / "trajectories.csv"));
}

TEST_CASE("every command reproduces bit-exactly from its metadata") {
    const auto synth_dir = fresh("rt_synth");
    REQUIRE(run_cli("synth-data --n-trades 2000 --out " + synth_dir.string()) ==
            0);
    const std::string tape = (synth_dir / "trades.csv").string();

    const std::vector<std::pair<std::string, std::string>> cases = {
        {"gss-solve", "gss-solve --iotas=0.5 --rhos=2.5 --resolution 31"},
        {"gss-oracle", "gss-oracle --iota -0.5 --n 100 --n-list=50,100"},
        {"cj-simulate",
         "cj-simulate --n-paths 4 --integration-steps 100 --resolution 11"},
        {"cj-surface", "cj-surface --resolution 7"},
        {"synth-data", "synth-data --n-trades 1500 --seed 5"},
        {"estimate",
         "estimate --input " + tape + " --lags=3,5 --horizons=1 "
         "--trades-per-interval 250"},
    };
    for (const auto& [name, args] : cases) {
        CAPTURE(name);
        const auto first = fresh("rt_" + name + "_1");
        const auto second = fresh("rt_" + name + "_2");
        REQUIRE(run_cli(args + " --out " + first.string()) == 0);
        REQUIRE(run_cli(name + " --config " +
                        (first / "metadata.json").string() + " --out " +
                        second.string()) == 0);
        check_dirs_equal(first, second);
    }
}

TEST_CASE("exit codes separate config, numeric, and file problems") {
    const auto dir = fresh("codes");
    const std::string out = " --out " + dir.string();

    CHECK(run_cli("gss-solve --x0 -3" + out + " 2>/dev/null") == 2);
    CHECK(run_cli("gss-solve --bogus-flag 1" + out + " 2>/dev/null") == 2);
    CHECK(run_cli("no-such-command 2>/dev/null") == 2);
    CHECK(run_cli("estimate --input /no/such/tape.csv" + out +
                  " 2>/dev/null") == 4);

    // Unknown keys in a config file are config errors, not silent noise.
    const auto bad_cfg = kRoot / "bad_key.json";
    write_file(bad_cfg, "{\"bogus\": 1}\n");
    CHECK(run_cli("gss-solve --config " + bad_cfg.string() + out +
                  " 2>/dev/null") == 2);

    // A field-level tape problem names its line on stderr.
    const auto bad_tape = kRoot / "bad_tape.csv";
    write_file(bad_tape, std::string(kTapeHeader) +
                             "0,100,1,200,200,IB,100,100\n"
                             "1,100,1,200,200,IB,100\n");
    const auto err_file = kRoot / "stderr.txt";
    CHECK(run_cli("estimate --input " + bad_tape.string() + out + " 2>" +
                  err_file.string()) == 4);
    CHECK(slurp(err_file).find(":3:") != std::string::npos);

    // A constant imbalance makes the signal regression degenerate.
    std::string flat(kTapeHeader);
    for (int i = 0; i < 400; ++i) {
        flat += std::to_string(i) + ",100,1,200,200,IB,100,100\n";
    }
    const auto flat_tape = kRoot / "flat_tape.csv";
    write_file(flat_tape, flat);
    CHECK(run_cli("estimate --input " + flat_tape.string() + " --lags=3" +
                  out + " 2>/dev/null") == 3);

    CHECK(run_cli("--help >/dev/null") == 0);
    CHECK(run_cli("cj-simulate --help >/dev/null") == 0);
}
