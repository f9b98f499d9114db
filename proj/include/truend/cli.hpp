#pragma once

#include "truend/synthgen.hpp"
#include "truend/treatment.hpp"
#include "truend/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace truend {

// Flat run configuration shared by all subcommands. Values come from an
// optional key=value config file, overridden by command-line flags.
struct RunConfig {
    std::string input_path;
    std::string output_dir = ".";
    std::string thresholds_spec = "default24";  // or comma-separated values
    int tau = 6;
    int min_len = 1;
    std::string weight_spec = "auto";  // or a number in [0,1]
    std::string scope_spec = "terminated";  // or "all"
    double discount_rate = 0.0;
    int horizon_months = 120;
    std::uint64_t seed = 42;
    std::optional<std::size_t> subsample_n;
    unsigned threads = 1;
    int bins = 20;
    bool clamp_losses = false;
    double apply_threshold = 0.0;  // b for the apply subcommand
    std::string before_path;       // impact inputs
    std::string after_path;

    SynthParams synth;

    // Parsed views of the string-valued fields; throw on malformed input.
    std::vector<double> thresholds() const;
    std::optional<double> weight() const;
    Scope scope() const;

    void load_file(const std::string& path);
    void set(const std::string& key, const std::string& value);
    std::string echo() const;  // config.* lines for the manifest
};

int run_synth(const RunConfig& config);
int run_optimise(const RunConfig& config);
int run_apply(const RunConfig& config);
int run_impact(const RunConfig& config);

// Maps exceptions onto the documented exit codes: 0 success, 1 usage,
// 2 data error, 3 computation error.
int dispatch(const std::string& command, const RunConfig& config,
             std::ostream& err);

}  // namespace truend
