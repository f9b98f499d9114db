#include "truend/tzb.hpp"

#include <algorithm>
#include <stdexcept>

namespace truend {

void TzbParams::validate() const {
    if (threshold < 0.0) throw std::invalid_argument("threshold must be >= 0");
    if (tau < 1) throw std::invalid_argument("tau must be >= 1");
    if (min_len < 1) throw std::invalid_argument("min_len must be >= 1");
    if (weight < 0.0 || weight > 1.0)
        throw std::invalid_argument("weight must be in [0,1]");
}

BoolArray TzbAssessment::membership() const {
    BoolArray z = BoolArray::Constant(length, false);
    if (tzb_start)
        for (int t = *tzb_start; t <= length; ++t) z(t - 1) = true;
    return z;
}

std::optional<int> find_tzb_start(const VectorXd& balances, double threshold,
                                  int min_len) {
    if (threshold < 0.0) throw std::invalid_argument("threshold must be >= 0");
    if (min_len < 1) throw std::invalid_argument("min_len must be >= 1");
    const int T = static_cast<int>(balances.size());
    // earliest start of the all-small suffix
    int start = T + 1;
    while (start > 1 && balances(start - 2) <= threshold) --start;
    if (start > T) return std::nullopt;         // last balance already above b
    if (T - start < min_len) return std::nullopt;
    return start + 1;
}

BoolArray tzb_membership(const VectorXd& balances, double threshold,
                         int min_len) {
    const int T = static_cast<int>(balances.size());
    BoolArray z = BoolArray::Constant(T, false);
    if (auto tz = find_tzb_start(balances, threshold, min_len))
        for (int t = *tz; t <= T; ++t) z(t - 1) = true;
    return z;
}

double mean_tzb_balance(const VectorXd& balances, int tzb_start) {
    const int T = static_cast<int>(balances.size());
    if (tzb_start < 1 || tzb_start > T)
        throw std::invalid_argument("tzb_start outside history");
    return balances.segment(tzb_start - 1, T - tzb_start + 1).mean();
}

double mean_pre_tzb_balance(const VectorXd& balances, int t_end, int tau) {
    const int T = static_cast<int>(balances.size());
    if (t_end < 1 || t_end > T)
        throw std::invalid_argument("t_end outside history");
    if (tau < 1) throw std::invalid_argument("tau must be >= 1");
    const int first = std::max(1, t_end - tau + 1);
    return balances.segment(first - 1, t_end - first + 1).mean();
}

std::optional<double> contamination_degree(double tzb_mean, double pre_mean) {
    if (tzb_mean < 0.0 || pre_mean < 0.0)
        throw std::invalid_argument("means must be non-negative");
    const double denom = tzb_mean + pre_mean;
    if (denom == 0.0) return std::nullopt;
    return tzb_mean / denom;
}

double loan_objective(double tzb_mean, double pre_mean, double weight) {
    return weight * pre_mean - tzb_mean;
}

TzbAssessment assess(const LoanHistory& loan, const TzbParams& params) {
    params.validate();
    TzbAssessment a;
    a.loan_id = loan.loan_id;
    a.length = loan.length();
    a.tzb_start = find_tzb_start(loan.balance, params.threshold, params.min_len);
    const int t_end = a.true_end();
    a.pre_mean = mean_pre_tzb_balance(loan.balance, t_end, params.tau);
    a.pre_window_short = t_end < params.tau;
    if (a.tzb_start) {
        a.tzb_mean = mean_tzb_balance(loan.balance, *a.tzb_start);
        a.contamination = contamination_degree(*a.tzb_mean, a.pre_mean);
        a.objective = loan_objective(*a.tzb_mean, a.pre_mean, params.weight);
    }
    return a;
}

}  // namespace truend
