#include "truend/treatment.hpp"

#include "truend/format.hpp"
#include "truend/parallel.hpp"
#include "truend/tzb.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

namespace truend {

std::string_view scope_name(Scope s) {
    return s == Scope::TerminatedOnly ? "terminated" : "all";
}

std::string TreatmentReport::to_text() const {
    std::ostringstream os;
    os << "policy_b=" << format_double(threshold) << '\n'
       << "scope=" << scope_name(scope) << '\n'
       << "accounts_affected=" << accounts_affected << '\n'
       << "records_discarded=" << records_discarded << '\n'
       << "mean_tzb_len=" << format_double(mean_tzb_length) << '\n'
       << "median_tzb_len=" << format_double(median_tzb_length) << '\n'
       << "terminated_share_of_tzb=" << format_double(terminated_share) << '\n'
       << "discarded_balance=" << format_currency(discarded_balance) << '\n';
    return os.str();
}

std::string TreatmentReport::to_csv() const {
    std::ostringstream os;
    os << "policy_b,scope,accounts_affected,records_discarded,mean_tzb_len,"
          "median_tzb_len,terminated_share_of_tzb,discarded_balance\n"
       << format_double(threshold) << ',' << scope_name(scope) << ','
       << accounts_affected << ',' << records_discarded << ','
       << format_double(mean_tzb_length) << ','
       << format_double(median_tzb_length) << ','
       << format_double(terminated_share) << ','
       << format_currency(discarded_balance) << '\n';
    return os.str();
}

namespace {

double median_of_sorted(std::vector<int>& values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return (static_cast<double>(values[n / 2 - 1]) + values[n / 2]) / 2.0;
}

RecordStatus terminal_marker(TerminalStatus s) {
    return s == TerminalStatus::WriteOff ? RecordStatus::WriteOff
                                         : RecordStatus::Settlement;
}

}  // namespace

std::pair<Portfolio, TreatmentReport> apply_policy(const Portfolio& portfolio,
                                                   double threshold,
                                                   int min_len, Scope scope,
                                                   unsigned threads) {
    if (threshold < 0.0) throw std::invalid_argument("threshold must be >= 0");

    struct LoanOutcome {
        LoanHistory treated;
        bool detected = false;
        bool affected = false;
        bool terminated = false;
        int tzb_length = 0;
        double discarded_balance = 0.0;
    };
    const std::size_t n = portfolio.size();
    std::vector<LoanOutcome> outcomes(n);

    parallel_for(n, threads, [&](std::size_t i) {
        const LoanHistory& loan = portfolio.loans[i];
        LoanOutcome& out = outcomes[i];
        const TerminalStatus terminal = loan.terminal_status();
        out.terminated = terminal != TerminalStatus::Active;
        const auto tz = find_tzb_start(loan.balance, threshold, min_len);
        if (tz) {
            out.detected = true;
            out.affected = scope == Scope::AllAccounts || out.terminated;
        }
        if (!out.affected) {
            out.treated = loan;
            return;
        }
        out.tzb_length = loan.length() - *tz + 1;
        out.discarded_balance =
            loan.balance.tail(out.tzb_length).sum();
        std::optional<RecordStatus> marker;
        if (out.terminated) marker = terminal_marker(terminal);
        out.treated = loan.truncated(*tz - 1, marker);
    });

    Portfolio treated;
    treated.loans.reserve(n);
    TreatmentReport report;
    report.threshold = threshold;
    report.scope = scope;
    int detected = 0;
    int detected_terminated = 0;
    std::vector<int> lengths;
    for (LoanOutcome& out : outcomes) {
        if (out.detected) {
            ++detected;
            if (out.terminated) ++detected_terminated;
        }
        if (out.affected) {
            ++report.accounts_affected;
            report.records_discarded += out.tzb_length;
            report.discarded_balance += out.discarded_balance;
            lengths.push_back(out.tzb_length);
        }
        treated.loans.push_back(std::move(out.treated));
    }
    if (!lengths.empty()) {
        long long sum = 0;
        for (int len : lengths) sum += len;
        report.mean_tzb_length = static_cast<double>(sum) / lengths.size();
        report.median_tzb_length = median_of_sorted(lengths);
    }
    if (detected > 0)
        report.terminated_share =
            static_cast<double>(detected_terminated) / detected;
    treated.finalise();
    return {std::move(treated), report};
}

AgeImpact age_impact(const Portfolio& before, const Portfolio& after) {
    if (before.size() != after.size())
        throw DataError("mismatched portfolios: different account counts");

    std::vector<int> ages_before, ages_after;
    ages_before.reserve(before.size());
    ages_after.reserve(after.size());
    double sum_before = 0.0, sum_after = 0.0;
    for (std::size_t i = 0; i < before.size(); ++i) {
        if (before.loans[i].loan_id != after.loans[i].loan_id)
            throw DataError("mismatched portfolios: loan_id sets differ");
        ages_before.push_back(before.loans[i].length());
        ages_after.push_back(after.loans[i].length());
        sum_before += before.loans[i].length();
        sum_after += after.loans[i].length();
    }

    AgeImpact impact;
    impact.mean_before = sum_before / before.size();
    impact.mean_after = sum_after / after.size();
    impact.median_before = median_of_sorted(ages_before);
    impact.median_after = median_of_sorted(ages_after);
    return impact;
}

}  // namespace truend
