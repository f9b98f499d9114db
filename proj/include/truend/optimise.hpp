#pragma once

#include "truend/tzb.hpp"
#include "truend/types.hpp"

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace truend {

// Candidate thresholds, strictly increasing and non-negative.
struct SearchSpace {
    std::vector<double> thresholds;

    // The built-in 24-value grid used by default.
    static SearchSpace defaults();

    void validate() const;
};

// Portfolio statistics for one candidate threshold.
struct ThresholdEvaluation {
    double threshold = 0.0;                   // b
    int tzb_count = 0;                        // n_s
    std::optional<double> objective_mean;     // mean loan objective
    std::optional<double> objective_stddev;   // sample std dev, divisor n_s-1
    std::optional<double> objective;          // f = sum(l_i) / stddev
    std::optional<double> tzb_mean;           // portfolio mean of M1
    double pre_mean = 0.0;                    // portfolio mean of M2, divisor N
    std::optional<double> contamination;      // portfolio contamination degree
    double prevalence = 0.0;                  // share of accounts with a TZB-period
    double mean_age = 0.0;                    // mean age after hypothetical truncation
    std::optional<double> mean_tzb_length;    // mean TZB-period length, months
    int short_pre_windows = 0;                // true ends with fewer than tau prior months
};

struct OptimisationOutcome {
    std::vector<ThresholdEvaluation> curve;
    double best_threshold = 0.0;        // b*
    std::vector<double> region;         // thresholds within the optimal region
    double weight_used = 0.0;           // w applied to every evaluation
    std::optional<double> midpoint;     // calibrated midpoint, when computable
    bool weight_fallback_low = false;   // contamination missing at an extreme,
    bool weight_fallback_high = false;  // nearest defined threshold used instead
};

struct PortfolioMeans {
    std::optional<double> tzb_mean;  // mean M1 over the TZB-set
    double pre_mean = 0.0;           // mean M2 over all accounts
    int tzb_count = 0;
};

// Mean M1 over the n_s TZB accounts and mean M2 over all N accounts (TZB
// accounts measured at their true end, the rest at T).
PortfolioMeans portfolio_means(const Portfolio& portfolio, double threshold,
                               int tau, int min_len);

std::optional<double> portfolio_contamination(double tzb_mean, double pre_mean);

struct CalibratedWeight {
    double value = 0.0;
    bool fallback_low = false;
    bool fallback_high = false;
};

// Midpoint of the contamination degrees at the first and last thresholds.
// When an extreme has no defined value, the nearest defined threshold is
// used and flagged. Throws ComputationError when none is defined.
CalibratedWeight calibrate_weight(
    const std::vector<std::pair<double, std::optional<double>>>& contamination_curve);

ThresholdEvaluation evaluate_threshold(const Portfolio& portfolio,
                                       const TzbParams& params,
                                       unsigned threads = 1);

// Full procedure: evaluate the search space, calibrate w via the midpoint
// when absent, pick b* as the argmax of defined objectives (ties resolved
// to the smallest threshold) and compute the optimal region.
OptimisationOutcome optimise(const Portfolio& portfolio,
                             const SearchSpace& space, int tau, int min_len,
                             std::optional<double> weight,
                             unsigned threads = 1,
                             double region_quantile = 0.25);

// Thresholds whose min-max normalised Euclidean distance to the maximiser
// falls within the given lower quantile of all distances. When every
// objective is equal the whole curve is returned.
std::vector<double> optimal_region(
    const std::vector<std::pair<double, double>>& objective_curve,
    double quantile);

// Columns: b,n_s,l_bar,s_bar,f,m1_bar,m2_bar,phi_bar,prevalence,mean_age,
// mean_tzb_len. Undefined values are left empty.
void write_curve_csv(const std::vector<ThresholdEvaluation>& curve,
                     std::ostream& out);
void write_curve_csv_file(const std::vector<ThresholdEvaluation>& curve,
                          const std::string& path);

}  // namespace truend
