#pragma once

#include "truend/types.hpp"

#include <optional>

namespace truend {

// Detection and objective parameters for one threshold.
struct TzbParams {
    double threshold = 0.0;  // b, currency
    int tau = 6;             // pre-period window length, months
    int min_len = 1;         // minimum trailing-period length, months
    double weight = 0.0;     // w in [0,1], scales the pre-period mean

    void validate() const;
};

// Per-account detection result at one threshold.
struct TzbAssessment {
    std::string loan_id;
    int length = 0;                      // observed lifetime T
    std::optional<int> tzb_start;        // t_z, 1-based; absent when not a TZB account
    std::optional<double> tzb_mean;      // M1
    double pre_mean = 0.0;               // M2
    std::optional<double> contamination; // M1/(M1+M2)
    std::optional<double> objective;     // w*M2 - M1
    bool pre_window_short = false;       // fewer than tau months before the true end

    bool is_tzb() const { return tzb_start.has_value(); }
    // Last credible record: t_z - 1 for TZB accounts, T otherwise.
    int true_end() const { return tzb_start ? *tzb_start - 1 : length; }
    int tzb_length() const { return tzb_start ? length - *tzb_start + 1 : 0; }
    BoolArray membership() const;
};

// Start of the trailing small-balance period: t_z = t' + 1 where t' is the
// earliest index whose whole suffix stays at or below the threshold and
// T - t' >= min_len. The record at t' is retained as the true end. Absent
// when no such t' exists.
std::optional<int> find_tzb_start(const VectorXd& balances, double threshold,
                                  int min_len);

// Membership indicator over t = 1..T: true exactly on [t_z, T].
BoolArray tzb_membership(const VectorXd& balances, double threshold, int min_len);

// M1: mean balance over [t_z, T], divided by the number of terms.
double mean_tzb_balance(const VectorXd& balances, int tzb_start);

// M2: mean balance over the (at most) tau months ending at t_end. Shorter
// histories average whatever months exist.
double mean_pre_tzb_balance(const VectorXd& balances, int t_end, int tau);

// M1/(M1+M2); absent when the denominator is zero.
std::optional<double> contamination_degree(double tzb_mean, double pre_mean);

// Loan-level objective w*M2 - M1.
double loan_objective(double tzb_mean, double pre_mean, double weight);

TzbAssessment assess(const LoanHistory& loan, const TzbParams& params);

}  // namespace truend
