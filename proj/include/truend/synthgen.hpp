#pragma once

#include "truend/tzb.hpp"
#include "truend/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace truend {

// Knobs for the ground-truth portfolio generator. Loans follow a monthly
// annuity schedule with stochastic settlement, default and write-off; a
// chosen share of terminated loans then receives a trailing period of
// near-zero balances appended after the genuine closure record.
struct SynthParams {
    int n_loans = 1000;
    int term_months = 240;
    double principal_min = 400000.0;
    double principal_max = 1500000.0;
    double annual_rate_min = 0.07;
    double annual_rate_max = 0.14;

    double p_default = 0.0025;        // monthly, healthy months only
    double p_cure = 0.0;              // monthly, while in default
    double p_settle = 0.005;          // monthly, healthy months only
    double p_writeoff = 0.08;         // monthly, while in default
    int max_default_months = 60;      // forced write-off beyond this
    double default_balance_floor = 0.05;  // no default once balance < frac of principal
    double recovery_prob = 0.4;       // chance of a partial receipt in a default month
    double recovery_cap_frac = 0.015; // cap as fraction of current balance
    double writeoff_recovery_min = 0.25;  // collateral proceeds at write-off,
    double writeoff_recovery_max = 0.65;  // fraction of the closing balance

    double settle_residual_cap = 50.0;  // balance left on the closure record

    // A share of settlements winds the balance down over several months
    // before closing. Each such loan stops dwindling at its own floor drawn
    // from [winddown_floor_min, winddown_floor_max]; keeping the lower edge
    // above the corruption band preserves the separation guarantee while
    // spreading genuine trailing balances across every larger scale.
    double p_winddown = 0.35;
    double winddown_factor_min = 0.45;  // monthly balance retention while
    double winddown_factor_max = 0.65;  // winding down
    double winddown_floor_min = 2200.0;
    double winddown_floor_max = 9000.0;

    double tzb_fraction = 0.25;       // share of terminated loans corrupted
    double tail_mean_months = 12.0;   // geometric mean tail length
    int tail_max_months = 36;
    double tail_balance_cap = 50.0;   // tail balances stay within [0, cap]
    double tail_accrual = 0.01;       // monthly upward drift within the tail
    double unrecorded_closure_fraction = 0.0;  // corrupted settlements left
                                               // without any closure marker
    int window_months = 0;            // 0 = observe every loan to termination
    std::uint64_t seed = 1;

    void validate() const;
};

struct LoanTruth {
    std::string loan_id;
    int true_end = 0;      // period index of the genuine closure record
    bool injected = false;
    int tail_length = 0;
};

struct GroundTruth {
    std::vector<LoanTruth> loans;  // ascending loan_id

    const LoanTruth* find(std::string_view loan_id) const;
    int injected_count() const;
    int max_tail_length() const;
};

std::pair<Portfolio, GroundTruth> generate(const SynthParams& params,
                                           unsigned threads = 1);

struct RecoveryMetrics {
    double exact_recovery_rate = 1.0;  // detected end == true end, injected loans
    double false_positive_rate = 0.0;  // detections on uninjected loans
    double mean_abs_endpoint_error = 0.0;  // months, over injected loans
    int injected = 0;
    int exact = 0;
    int false_positives = 0;
};

// Compares per-loan assessments at one threshold against the generator
// truth. Assessment and truth loan sets must match.
RecoveryMetrics evaluate_recovery(const std::vector<TzbAssessment>& assessments,
                                  const GroundTruth& truth);

// LoanID,TrueEnd,Injected,TailLen
void write_truth_csv(const GroundTruth& truth, std::ostream& out);
void write_truth_csv_file(const GroundTruth& truth, const std::string& path);
GroundTruth read_truth_csv_file(const std::string& path);

}  // namespace truend
