#include "truend/cli.hpp"

#include "truend/csv_io.hpp"
#include "truend/format.hpp"
#include "truend/optimise.hpp"
#include "truend/sampling.hpp"
#include "truend/survival.hpp"
#include "truend/tzb.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace truend {

namespace fs = std::filesystem;

namespace {

// Collects (name, digest) pairs and writes the run manifest.
class Manifest {
public:
    Manifest(std::string command, const RunConfig& config)
        : command_(std::move(command)), config_echo_(config.echo()) {}

    void add_input(const std::string& label, const std::string& path) {
        inputs_.emplace_back(label, to_hex(fnv1a64_file(path)));
    }
    void add_output(const std::string& label, const std::string& path) {
        outputs_.emplace_back(label, to_hex(fnv1a64_file(path)));
    }

    void write(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot open output file: " + path);
        out << "command=" << command_ << '\n' << config_echo_;
        for (const auto& [label, digest] : inputs_)
            out << "input." << label << "=" << digest << '\n';
        for (const auto& [label, digest] : outputs_)
            out << "output." << label << "=" << digest << '\n';
        if (!out) throw DataError("failed writing " + path);
    }

private:
    std::string command_;
    std::string config_echo_;
    std::vector<std::pair<std::string, std::string>> inputs_;
    std::vector<std::pair<std::string, std::string>> outputs_;
};

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void ensure_output_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory: " + dir);
    // probe writability early so failures name the directory
    const std::string probe = join_path(dir, ".truend_probe");
    {
        std::ofstream out(probe, std::ios::binary);
        if (!out) throw DataError("output directory not writable: " + dir);
    }
    fs::remove(probe, ec);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    out << text;
    if (!out) throw DataError("failed writing " + path);
}

std::string outcome_text(const OptimisationOutcome& outcome) {
    std::ostringstream os;
    os << "b_star=" << format_double(outcome.best_threshold) << '\n';
    os << "w_used=" << format_double(outcome.weight_used) << '\n';
    os << "midpoint="
       << (outcome.midpoint ? format_double(*outcome.midpoint) : std::string())
       << '\n';
    os << "region=";
    for (std::size_t i = 0; i < outcome.region.size(); ++i)
        os << (i ? "," : "") << format_double(outcome.region[i]);
    os << '\n';
    os << "weight_fallback_low=" << (outcome.weight_fallback_low ? 1 : 0) << '\n';
    os << "weight_fallback_high=" << (outcome.weight_fallback_high ? 1 : 0)
       << '\n';
    int defined = 0;
    int short_windows = 0;
    for (const ThresholdEvaluation& ev : outcome.curve) {
        defined += ev.objective ? 1 : 0;
        short_windows = std::max(short_windows, ev.short_pre_windows);
    }
    os << "thresholds_evaluated=" << outcome.curve.size() << '\n';
    os << "defined_objectives=" << defined << '\n';
    os << "short_pre_windows_max=" << short_windows << '\n';
    return os.str();
}

}  // namespace

std::vector<double> RunConfig::thresholds() const {
    if (thresholds_spec == "default24") return SearchSpace::defaults().thresholds;
    std::vector<double> out;
    std::stringstream ss(thresholds_spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v;
        if (!parse_double(item, v))
            throw std::invalid_argument("bad threshold value: " + item);
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty threshold list");
    return out;
}

std::optional<double> RunConfig::weight() const {
    if (weight_spec == "auto") return std::nullopt;
    double v;
    if (!parse_double(weight_spec, v) || v < 0.0 || v > 1.0)
        throw std::invalid_argument("w must be 'auto' or a number in [0,1]");
    return v;
}

Scope RunConfig::scope() const {
    if (scope_spec == "terminated") return Scope::TerminatedOnly;
    if (scope_spec == "all") return Scope::AllAccounts;
    throw std::invalid_argument("scope must be 'terminated' or 'all'");
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
            line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t");
            return s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("bad config line " +
                                        std::to_string(line_no) + ": " + line);
        set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

void RunConfig::set(const std::string& key, const std::string& value) {
    auto as_double = [&](double& slot) {
        if (!parse_double(value, slot))
            throw std::invalid_argument("bad numeric value for " + key + ": " + value);
    };
    auto as_int = [&](int& slot) {
        long long v;
        if (!parse_int(value, v))
            throw std::invalid_argument("bad integer value for " + key + ": " + value);
        slot = static_cast<int>(v);
    };

    if (key == "input") input_path = value;
    else if (key == "out") output_dir = value;
    else if (key == "thresholds") thresholds_spec = value;
    else if (key == "tau") as_int(tau);
    else if (key == "min_len") as_int(min_len);
    else if (key == "w") weight_spec = value;
    else if (key == "scope") scope_spec = value;
    else if (key == "discount_rate") as_double(discount_rate);
    else if (key == "horizon") as_int(horizon_months);
    else if (key == "seed") {
        long long v;
        if (!parse_int(value, v) || v < 0)
            throw std::invalid_argument("bad seed: " + value);
        seed = static_cast<std::uint64_t>(v);
    } else if (key == "subsample") {
        long long v;
        if (!parse_int(value, v) || v < 1)
            throw std::invalid_argument("bad subsample size: " + value);
        subsample_n = static_cast<std::size_t>(v);
    } else if (key == "threads") {
        long long v;
        if (!parse_int(value, v) || v < 1)
            throw std::invalid_argument("bad thread count: " + value);
        threads = static_cast<unsigned>(v);
    } else if (key == "bins") as_int(bins);
    else if (key == "clamp_losses") clamp_losses = value == "1" || value == "true";
    else if (key == "b") as_double(apply_threshold);
    else if (key == "before") before_path = value;
    else if (key == "after") after_path = value;
    else if (key == "n_loans") as_int(synth.n_loans);
    else if (key == "term_months") as_int(synth.term_months);
    else if (key == "principal_min") as_double(synth.principal_min);
    else if (key == "principal_max") as_double(synth.principal_max);
    else if (key == "rate_min") as_double(synth.annual_rate_min);
    else if (key == "rate_max") as_double(synth.annual_rate_max);
    else if (key == "p_default") as_double(synth.p_default);
    else if (key == "p_cure") as_double(synth.p_cure);
    else if (key == "p_settle") as_double(synth.p_settle);
    else if (key == "p_writeoff") as_double(synth.p_writeoff);
    else if (key == "max_default_months") as_int(synth.max_default_months);
    else if (key == "default_balance_floor") as_double(synth.default_balance_floor);
    else if (key == "recovery_prob") as_double(synth.recovery_prob);
    else if (key == "recovery_cap_frac") as_double(synth.recovery_cap_frac);
    else if (key == "writeoff_recovery_min") as_double(synth.writeoff_recovery_min);
    else if (key == "writeoff_recovery_max") as_double(synth.writeoff_recovery_max);
    else if (key == "settle_residual_cap") as_double(synth.settle_residual_cap);
    else if (key == "p_winddown") as_double(synth.p_winddown);
    else if (key == "winddown_factor_min") as_double(synth.winddown_factor_min);
    else if (key == "winddown_factor_max") as_double(synth.winddown_factor_max);
    else if (key == "winddown_floor_min") as_double(synth.winddown_floor_min);
    else if (key == "winddown_floor_max") as_double(synth.winddown_floor_max);
    else if (key == "tzb_fraction") as_double(synth.tzb_fraction);
    else if (key == "tail_mean_months") as_double(synth.tail_mean_months);
    else if (key == "tail_max_months") as_int(synth.tail_max_months);
    else if (key == "tail_balance_cap") as_double(synth.tail_balance_cap);
    else if (key == "tail_accrual") as_double(synth.tail_accrual);
    else if (key == "unrecorded_closure_fraction")
        as_double(synth.unrecorded_closure_fraction);
    else if (key == "window_months") as_int(synth.window_months);
    else throw std::invalid_argument("unknown config key: " + key);
}

std::string RunConfig::echo() const {
    std::ostringstream os;
    os << "config.input=" << input_path << '\n'
       << "config.out=" << output_dir << '\n'
       << "config.thresholds=" << thresholds_spec << '\n'
       << "config.tau=" << tau << '\n'
       << "config.min_len=" << min_len << '\n'
       << "config.w=" << weight_spec << '\n'
       << "config.scope=" << scope_spec << '\n'
       << "config.discount_rate=" << format_double(discount_rate) << '\n'
       << "config.horizon=" << horizon_months << '\n'
       << "config.seed=" << seed << '\n'
       << "config.threads=" << threads << '\n'
       << "config.bins=" << bins << '\n'
       << "config.clamp_losses=" << (clamp_losses ? 1 : 0) << '\n'
       << "config.b=" << format_double(apply_threshold) << '\n';
    if (subsample_n) os << "config.subsample=" << *subsample_n << '\n';
    if (!before_path.empty()) os << "config.before=" << before_path << '\n';
    if (!after_path.empty()) os << "config.after=" << after_path << '\n';
    os << "config.n_loans=" << synth.n_loans << '\n'
       << "config.term_months=" << synth.term_months << '\n'
       << "config.tzb_fraction=" << format_double(synth.tzb_fraction) << '\n'
       << "config.tail_balance_cap=" << format_double(synth.tail_balance_cap)
       << '\n'
       << "config.settle_residual_cap="
       << format_double(synth.settle_residual_cap) << '\n'
       << "config.window_months=" << synth.window_months << '\n';
    return os.str();
}

int run_synth(const RunConfig& config) {
    ensure_output_dir(config.output_dir);
    SynthParams params = config.synth;
    params.seed = config.seed;
    auto [portfolio, truth] = generate(params, config.threads);

    const std::string portfolio_path = join_path(config.output_dir, "portfolio.csv");
    const std::string truth_path = join_path(config.output_dir, "truth.csv");
    write_portfolio_csv_file(portfolio, portfolio_path);
    write_truth_csv_file(truth, truth_path);

    Manifest manifest("synth", config);
    manifest.add_output("portfolio.csv", portfolio_path);
    manifest.add_output("truth.csv", truth_path);
    manifest.write(join_path(config.output_dir, "manifest.txt"));
    return 0;
}

namespace {

void optimise_to_files(const Portfolio& portfolio, const RunConfig& config,
                       const std::string& curve_name,
                       const std::string& outcome_name, Manifest& manifest) {
    SearchSpace space{config.thresholds()};
    const OptimisationOutcome outcome =
        optimise(portfolio, space, config.tau, config.min_len, config.weight(),
                 config.threads);
    const std::string curve_path = join_path(config.output_dir, curve_name);
    const std::string outcome_path = join_path(config.output_dir, outcome_name);
    write_curve_csv_file(outcome.curve, curve_path);
    write_text_file(outcome_path, outcome_text(outcome));
    manifest.add_output(curve_name, curve_path);
    manifest.add_output(outcome_name, outcome_path);
}

}  // namespace

int run_optimise(const RunConfig& config) {
    if (config.input_path.empty())
        throw std::invalid_argument("optimise requires --input");
    ensure_output_dir(config.output_dir);
    Manifest manifest("optimise", config);
    manifest.add_input("portfolio", config.input_path);

    const Portfolio portfolio = ingest_csv_file(config.input_path);
    optimise_to_files(portfolio, config, "curve.csv", "outcome.txt", manifest);
    if (config.subsample_n) {
        const Portfolio sample =
            subsample_clustered(portfolio, *config.subsample_n, config.seed);
        optimise_to_files(sample, config, "curve_subsample.csv",
                          "outcome_subsample.txt", manifest);
    }
    manifest.write(join_path(config.output_dir, "manifest.txt"));
    return 0;
}

int run_apply(const RunConfig& config) {
    if (config.input_path.empty())
        throw std::invalid_argument("apply requires --input");
    ensure_output_dir(config.output_dir);
    Manifest manifest("apply", config);
    manifest.add_input("portfolio", config.input_path);

    const Portfolio portfolio = ingest_csv_file(config.input_path);
    auto [treated, report] = apply_policy(portfolio, config.apply_threshold,
                                          config.min_len, config.scope(),
                                          config.threads);

    const std::string treated_path = join_path(config.output_dir, "treated.csv");
    const std::string report_csv = join_path(config.output_dir, "treatment_report.csv");
    const std::string report_txt = join_path(config.output_dir, "treatment_report.txt");
    write_portfolio_csv_file(treated, treated_path);
    write_text_file(report_csv, report.to_csv());
    write_text_file(report_txt, report.to_text());
    manifest.add_output("treated.csv", treated_path);
    manifest.add_output("treatment_report.csv", report_csv);
    manifest.add_output("treatment_report.txt", report_txt);
    manifest.write(join_path(config.output_dir, "manifest.txt"));
    return 0;
}

int run_impact(const RunConfig& config) {
    if (config.before_path.empty() || config.after_path.empty())
        throw std::invalid_argument("impact requires --before and --after");
    ensure_output_dir(config.output_dir);
    Manifest manifest("impact", config);
    manifest.add_input("before", config.before_path);
    manifest.add_input("after", config.after_path);

    const Portfolio before = ingest_csv_file(config.before_path);
    const Portfolio after = ingest_csv_file(config.after_path);
    const AgeImpact ages = age_impact(before, after);

    const SpellExtraction spells_before = extract_default_spells(before, config.threads);
    const SpellExtraction spells_after = extract_default_spells(after, config.threads);
    if (spells_before.spells.empty() || spells_after.spells.empty())
        throw ComputationError("no default spells on one side of the comparison");

    SurvivalCurve km_before = km_estimator(spells_before.spells);
    SurvivalCurve km_after = km_estimator(spells_after.spells);

    const int horizon = config.horizon_months;
    const double mae_failure =
        curve_mae(sample_failure(km_before, horizon), sample_failure(km_after, horizon));
    const double mae_hazard =
        curve_mae(sample_hazard(km_before, horizon), sample_hazard(km_after, horizon));

    auto losses = [&](const std::vector<DefaultSpell>& spells) {
        std::vector<double> out;
        for (const DefaultSpell& s : spells)
            if (s.outcome == SpellOutcome::WriteOff)
                out.push_back(workout_loss_rate(s, config.discount_rate,
                                                config.clamp_losses));
        return out;
    };
    const std::vector<double> loss_before = losses(spells_before.spells);
    const std::vector<double> loss_after = losses(spells_after.spells);

    auto ages_of = [](const Portfolio& p) {
        std::vector<double> out;
        out.reserve(p.size());
        for (const LoanHistory& loan : p.loans) out.push_back(loan.length());
        return out;
    };
    const std::vector<double> age_before = ages_of(before);
    const std::vector<double> age_after = ages_of(after);

    auto shared_range = [](const std::vector<double>& a,
                           const std::vector<double>& b) {
        double lo = a.empty() ? 0.0 : a.front(), hi = lo;
        for (const auto* v : {&a, &b})
            for (double x : *v) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
        return std::pair(lo, hi);
    };

    ensure_output_dir(config.output_dir);
    auto out_path = [&](const std::string& name) {
        return join_path(config.output_dir, name);
    };

    write_survival_csv_file(km_before, out_path("survival_before.csv"), horizon);
    write_survival_csv_file(km_after, out_path("survival_after.csv"), horizon);
    write_spells_csv_file(spells_before.spells, config.discount_rate,
                          out_path("spells_before.csv"));
    write_spells_csv_file(spells_after.spells, config.discount_rate,
                          out_path("spells_after.csv"));

    const auto [age_lo, age_hi] = shared_range(age_before, age_after);
    write_histogram_csv_file(
        distribution_summary(age_before, config.bins, age_lo, age_hi),
        out_path("age_hist_before.csv"));
    write_histogram_csv_file(
        distribution_summary(age_after, config.bins, age_lo, age_hi),
        out_path("age_hist_after.csv"));

    std::ostringstream summary;
    summary << "mean_age_before=" << format_double(ages.mean_before) << '\n'
            << "mean_age_after=" << format_double(ages.mean_after) << '\n'
            << "mean_age_delta=" << format_double(ages.mean_delta()) << '\n'
            << "median_age_before=" << format_double(ages.median_before) << '\n'
            << "median_age_after=" << format_double(ages.median_after) << '\n'
            << "spells_before=" << spells_before.spells.size() << '\n'
            << "spells_after=" << spells_after.spells.size() << '\n'
            << "writeoffs_before=" << loss_before.size() << '\n'
            << "writeoffs_after=" << loss_after.size() << '\n';

    if (!loss_before.empty() && !loss_after.empty()) {
        const auto [loss_lo, loss_hi] = shared_range(loss_before, loss_after);
        const Histogram hb =
            distribution_summary(loss_before, config.bins, loss_lo, loss_hi);
        const Histogram ha =
            distribution_summary(loss_after, config.bins, loss_lo, loss_hi);
        write_histogram_csv_file(hb, out_path("loss_hist_before.csv"));
        write_histogram_csv_file(ha, out_path("loss_hist_after.csv"));
        manifest.add_output("loss_hist_before.csv", out_path("loss_hist_before.csv"));
        manifest.add_output("loss_hist_after.csv", out_path("loss_hist_after.csv"));
        summary << "mean_loss_before=" << format_double(hb.mean) << '\n'
                << "mean_loss_after=" << format_double(ha.mean) << '\n'
                << "mean_loss_delta=" << format_double(ha.mean - hb.mean) << '\n';
    }

    std::ostringstream mae;
    mae << "horizon=" << horizon << '\n'
        << "mae_F=" << format_double(mae_failure) << '\n'
        << "mae_h=" << format_double(mae_hazard) << '\n';
    write_text_file(out_path("mae.txt"), mae.str());
    write_text_file(out_path("impact_summary.txt"), summary.str());

    for (const char* name :
         {"survival_before.csv", "survival_after.csv", "spells_before.csv",
          "spells_after.csv", "age_hist_before.csv", "age_hist_after.csv",
          "mae.txt", "impact_summary.txt"})
        manifest.add_output(name, out_path(name));
    manifest.write(out_path("manifest.txt"));
    return 0;
}

int dispatch(const std::string& command, const RunConfig& config,
             std::ostream& err) {
    try {
        if (command == "synth") return run_synth(config);
        if (command == "optimise") return run_optimise(config);
        if (command == "apply") return run_apply(config);
        if (command == "impact") return run_impact(config);
        err << "error: unknown command " << command << '\n';
        return 1;
    } catch (const ComputationError& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const DataError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace truend
