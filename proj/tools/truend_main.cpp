#include "truend/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"TruEnd: trailing small-balance detection, threshold "
                 "optimisation and impact analytics for loan panels"};
    app.require_subcommand(1);

    truend::RunConfig config;
    std::string config_path;
    std::optional<long long> subsample;
    std::optional<std::string> thresholds, weight, scope;
    std::optional<double> discount, apply_b;
    std::optional<int> tau, min_len, horizon, bins;
    std::optional<long long> seed, threads;
    std::optional<std::string> input, out, before, after;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key=value config file");
        cmd->add_option("--input", input, "input portfolio CSV");
        cmd->add_option("--out", out, "output directory");
        cmd->add_option("--thresholds", thresholds,
                        "comma-separated thresholds or 'default24'");
        cmd->add_option("--tau", tau, "pre-period window length in months");
        cmd->add_option("--min-len", min_len, "minimum trailing-period length");
        cmd->add_option("--w", weight, "objective weight or 'auto'");
        cmd->add_option("--scope", scope, "treatment scope: terminated|all");
        cmd->add_option("--discount-rate", discount, "annual discount rate");
        cmd->add_option("--horizon", horizon, "survival horizon in months");
        cmd->add_option("--seed", seed, "random seed");
        cmd->add_option("--subsample", subsample, "clustered subsample size");
        cmd->add_option("--threads", threads, "worker thread cap");
        cmd->add_option("--bins", bins, "histogram bin count");
        return cmd;
    };

    CLI::App* synth = add_common(app.add_subcommand(
        "synth", "generate a synthetic portfolio with ground truth"));
    CLI::App* optimise = add_common(app.add_subcommand(
        "optimise", "evaluate the threshold search space and pick b*"));
    CLI::App* apply = add_common(app.add_subcommand(
        "apply", "discard trailing small-balance periods at a chosen b"));
    apply->add_option("--b", apply_b, "policy threshold b");
    CLI::App* impact = add_common(app.add_subcommand(
        "impact", "compare survival, hazards, ages and losses before vs after"));
    impact->add_option("--before", before, "untreated portfolio CSV");
    impact->add_option("--after", after, "treated portfolio CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) config.load_file(config_path);
        // flags override the config file
        if (input) config.input_path = *input;
        if (out) config.output_dir = *out;
        if (thresholds) config.thresholds_spec = *thresholds;
        if (tau) config.tau = *tau;
        if (min_len) config.min_len = *min_len;
        if (weight) config.weight_spec = *weight;
        if (scope) config.scope_spec = *scope;
        if (discount) config.discount_rate = *discount;
        if (horizon) config.horizon_months = *horizon;
        if (seed) config.set("seed", std::to_string(*seed));
        if (subsample) config.set("subsample", std::to_string(*subsample));
        if (threads) config.set("threads", std::to_string(*threads));
        if (bins) config.bins = *bins;
        if (apply_b) config.apply_threshold = *apply_b;
        if (before) config.before_path = *before;
        if (after) config.after_path = *after;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    std::string command;
    if (synth->parsed()) command = "synth";
    else if (optimise->parsed()) command = "optimise";
    else if (apply->parsed()) command = "apply";
    else if (impact->parsed()) command = "impact";

    return truend::dispatch(command, config, std::cerr);
}
