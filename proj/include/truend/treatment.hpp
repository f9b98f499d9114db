#pragma once

#include "truend/types.hpp"

#include <string>
#include <utility>

namespace truend {

enum class Scope { TerminatedOnly, AllAccounts };

std::string_view scope_name(Scope s);

struct TreatmentReport {
    double threshold = 0.0;
    Scope scope = Scope::TerminatedOnly;
    int accounts_affected = 0;
    long long records_discarded = 0;
    double mean_tzb_length = 0.0;    // over affected accounts
    double median_tzb_length = 0.0;
    double terminated_share = 0.0;   // terminated accounts among all detected TZB cases
    double discarded_balance = 0.0;  // total balance across discarded records

    std::string to_text() const;      // key=value block
    std::string to_csv() const;       // header + one row
};

// Removes the records t_z..T from every in-scope TZB account, keeping the
// true end. Terminated accounts keep their terminal marker on the new last
// record so the treated portfolio classifies identically downstream.
std::pair<Portfolio, TreatmentReport> apply_policy(const Portfolio& portfolio,
                                                   double threshold,
                                                   int min_len, Scope scope,
                                                   unsigned threads = 1);

struct AgeImpact {
    double mean_before = 0.0;
    double mean_after = 0.0;
    double median_before = 0.0;
    double median_after = 0.0;

    double mean_delta() const { return mean_after - mean_before; }
    double median_delta() const { return median_after - median_before; }
};

// Account ages (observed lifetimes in months) before vs after treatment.
// Both portfolios must cover the same loan_ids.
AgeImpact age_impact(const Portfolio& before, const Portfolio& after);

}  // namespace truend
