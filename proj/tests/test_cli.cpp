#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "truend/cli.hpp"
#include "truend/csv_io.hpp"
#include "truend/format.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace truend;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) {
        path = fs::temp_directory_path() / ("truend_test_" + name);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& leaf = "") const {
        return leaf.empty() ? path.string() : (path / leaf).string();
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::map<std::string, std::string> read_kv(const std::string& path) {
    std::map<std::string, std::string> out;
    std::istringstream is(slurp(path));
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return out;
}

RunConfig synth_config(const TempDir& dir, int n_loans = 300,
                       std::uint64_t seed = 99) {
    RunConfig cfg;
    cfg.output_dir = dir.str();
    cfg.seed = seed;
    cfg.synth.n_loans = n_loans;
    cfg.synth.term_months = 120;
    cfg.synth.tzb_fraction = 0.3;
    return cfg;
}

}  // namespace

TEST_CASE("synth writes portfolio, truth and manifest deterministically") {
    TempDir dir_a("synth_a"), dir_b("synth_b");
    CHECK(run_synth(synth_config(dir_a)) == 0);
    CHECK(run_synth(synth_config(dir_b)) == 0);

    const std::string portfolio_a = slurp(dir_a.str("portfolio.csv"));
    CHECK(portfolio_a == slurp(dir_b.str("portfolio.csv")));
    CHECK(slurp(dir_a.str("truth.csv")) == slurp(dir_b.str("truth.csv")));

    const auto manifest = read_kv(dir_a.str("manifest.txt"));
    CHECK(manifest.at("command") == "synth");
    CHECK(manifest.at("output.portfolio.csv") ==
          to_hex(fnv1a64(portfolio_a)));

    // a different seed changes the bytes
    TempDir dir_c("synth_c");
    CHECK(run_synth(synth_config(dir_c, 300, 100)) == 0);
    CHECK(portfolio_a != slurp(dir_c.str("portfolio.csv")));
}

TEST_CASE("optimise emits the curve and outcome; subsample adds a pair") {
    TempDir data("opt_data"), out("opt_out");
    RunConfig synth = synth_config(data, 400);
    REQUIRE(run_synth(synth) == 0);

    RunConfig cfg;
    cfg.input_path = data.str("portfolio.csv");
    cfg.output_dir = out.str();
    cfg.subsample_n = 120;
    cfg.seed = 5;
    CHECK(run_optimise(cfg) == 0);

    const std::string curve = slurp(out.str("curve.csv"));
    CHECK(curve.find("b,n_s,l_bar") == 0);
    const auto outcome = read_kv(out.str("outcome.txt"));
    CHECK(outcome.count("b_star") == 1);
    CHECK(outcome.count("w_used") == 1);
    CHECK(outcome.count("midpoint") == 1);
    double b_star = 0.0;
    REQUIRE(parse_double(outcome.at("b_star"), b_star));
    CHECK(b_star > 50.0);
    CHECK(b_star < 2000.0);

    CHECK(fs::exists(out.str("curve_subsample.csv")));
    CHECK(fs::exists(out.str("outcome_subsample.txt")));
    const auto manifest = read_kv(out.str("manifest.txt"));
    CHECK(manifest.count("input.portfolio") == 1);
    CHECK(manifest.count("output.curve.csv") == 1);
}

TEST_CASE("optimise without any trailing period reports exit code 3") {
    TempDir dir("opt_notzb");
    // two clean amortising accounts, no small suffix anywhere
    const std::string csv =
        "LoanID,Date,Balance,Principal,Instalment,Receipt,InterestRate,InDefault,Status\n"
        "A,2020-01,9000.00,9000.00,0.00,0.00,0.1,0,ACTIVE\n"
        "A,2020-02,8000.00,9000.00,0.00,0.00,0.1,0,ACTIVE\n"
        "B,2020-01,7000.00,9000.00,0.00,0.00,0.1,0,ACTIVE\n"
        "B,2020-02,6000.00,9000.00,0.00,0.00,0.1,0,ACTIVE\n";
    std::ofstream(dir.str("clean.csv")) << csv;
    RunConfig cfg;
    cfg.input_path = dir.str("clean.csv");
    cfg.output_dir = dir.str("out");
    std::ostringstream err;
    CHECK(dispatch("optimise", cfg, err) == 3);
    CHECK(err.str().find("objective") != std::string::npos);
}

TEST_CASE("missing input is a data error (exit 2)") {
    TempDir dir("missing");
    RunConfig cfg;
    cfg.input_path = dir.str("absent.csv");
    cfg.output_dir = dir.str("out");
    std::ostringstream err;
    CHECK(dispatch("optimise", cfg, err) == 2);
    CHECK(err.str().find("absent.csv") != std::string::npos);
}

TEST_CASE("apply on the worked example trims the account at month 61") {
    TempDir out("apply_t1");
    RunConfig cfg;
    cfg.input_path = TRUEND_TABLE1_CSV;
    cfg.output_dir = out.str();
    cfg.apply_threshold = 500.0;
    CHECK(run_apply(cfg) == 0);

    const Portfolio treated = ingest_csv_file(out.str("treated.csv"));
    const LoanHistory* loan = treated.find("T0001");
    REQUIRE(loan != nullptr);
    CHECK(loan->length() == 6);
    CHECK(loan->balance(5) == 156.47);
    CHECK(loan->first_month.plus(5).str() == "2012-01");
    CHECK(loan->terminal_status() == TerminalStatus::Settlement);

    const auto report = read_kv(out.str("treatment_report.txt"));
    CHECK(report.at("records_discarded") == "8");
    CHECK(fs::exists(out.str("treatment_report.csv")));
}

TEST_CASE("apply at b=0 with no exact-zero run leaves the bytes unchanged") {
    TempDir dir("apply_b0");
    // canonical writer format so treated.csv can be byte-compared
    const std::string csv =
        "LoanID,Date,Balance,Principal,Instalment,Receipt,InterestRate,InDefault,Status\n"
        "A,2020-01,100.00,500.00,10.00,10.00,0.1,0,ACTIVE\n"
        "A,2020-02,50.00,500.00,10.00,10.00,0.1,0,ACTIVE\n"
        "A,2020-03,0.00,500.00,10.00,60.00,0.1,0,SETTLE\n";
    std::ofstream(dir.str("input.csv"), std::ios::binary) << csv;
    RunConfig cfg;
    cfg.input_path = dir.str("input.csv");
    cfg.output_dir = dir.str("out");
    cfg.apply_threshold = 0.0;
    CHECK(run_apply(cfg) == 0);
    CHECK(slurp(dir.str("out/treated.csv")) == csv);
}

TEST_CASE("impact of a portfolio against itself is zero MAE everywhere") {
    TempDir data("impact_data"), out("impact_out");
    RunConfig synth = synth_config(data, 500);
    synth.synth.p_default = 0.004;  // ensure some spells
    REQUIRE(run_synth(synth) == 0);

    RunConfig cfg;
    cfg.before_path = data.str("portfolio.csv");
    cfg.after_path = data.str("portfolio.csv");
    cfg.output_dir = out.str();
    CHECK(run_impact(cfg) == 0);

    const auto mae = read_kv(out.str("mae.txt"));
    CHECK(mae.at("mae_F") == "0");
    CHECK(mae.at("mae_h") == "0");
    const auto summary = read_kv(out.str("impact_summary.txt"));
    CHECK(summary.at("mean_age_delta") == "0");
    CHECK(fs::exists(out.str("survival_before.csv")));
    CHECK(fs::exists(out.str("survival_after.csv")));
    CHECK(fs::exists(out.str("spells_before.csv")));
    CHECK(fs::exists(out.str("age_hist_before.csv")));
}

TEST_CASE("impact survival tables respect the horizon") {
    TempDir data("impact_h"), out("impact_h_out");
    RunConfig synth = synth_config(data, 400);
    synth.synth.p_default = 0.004;
    REQUIRE(run_synth(synth) == 0);

    RunConfig cfg;
    cfg.before_path = data.str("portfolio.csv");
    cfg.after_path = data.str("portfolio.csv");
    cfg.output_dir = out.str();
    cfg.horizon_months = 24;
    CHECK(run_impact(cfg) == 0);
    std::istringstream is(slurp(out.str("survival_before.csv")));
    std::string line;
    std::getline(is, line);  // header
    int max_t = -1;
    while (std::getline(is, line))
        max_t = std::max(max_t, std::stoi(line.substr(0, line.find(','))));
    CHECK(max_t <= 24);
}

TEST_CASE("config file values load and flags override") {
    TempDir dir("config");
    std::ofstream(dir.str("run.conf")) << "tau=9\nmin_len=2\nw=0.5\n"
                                       << "# comment line\n"
                                       << "scope=all\nseed=321\n";
    RunConfig cfg;
    cfg.load_file(dir.str("run.conf"));
    CHECK(cfg.tau == 9);
    CHECK(cfg.min_len == 2);
    CHECK(*cfg.weight() == 0.5);
    CHECK(cfg.scope() == Scope::AllAccounts);
    CHECK(cfg.seed == 321);

    cfg.set("tau", "6");
    CHECK(cfg.tau == 6);

    CHECK_THROWS_AS(cfg.set("nonsense", "1"), std::invalid_argument);
    RunConfig bad;
    CHECK_THROWS_AS(bad.set("w", "2.5"), std::invalid_argument);
    bad.weight_spec = "auto";
    CHECK_FALSE(bad.weight().has_value());
}

TEST_CASE("threshold specs parse as list or default24") {
    RunConfig cfg;
    CHECK(cfg.thresholds().size() == 24);
    cfg.thresholds_spec = "0,100,250";
    CHECK(cfg.thresholds() == std::vector<double>{0, 100, 250});
    cfg.thresholds_spec = "1,abc";
    CHECK_THROWS_AS(cfg.thresholds(), std::invalid_argument);
}

TEST_CASE("scope strings map onto the two scopes") {
    RunConfig cfg;
    CHECK(cfg.scope() == Scope::TerminatedOnly);
    cfg.scope_spec = "all";
    CHECK(cfg.scope() == Scope::AllAccounts);
    cfg.scope_spec = "everything";
    CHECK_THROWS_AS(cfg.scope(), std::invalid_argument);
}
