#pragma once

#include "truend/types.hpp"

#include <initializer_list>
#include <string>
#include <vector>

namespace truend::testing {

// Minimal loan builder: zero receipts, not in default, ACTIVE throughout
// unless a terminal status is requested for the last record.
inline LoanHistory make_loan(std::string id, const std::vector<double>& balances,
                             RecordStatus last_status = RecordStatus::Active) {
    LoanHistory loan;
    loan.loan_id = std::move(id);
    loan.first_month = YearMonth(2010, 1);
    const int T = static_cast<int>(balances.size());
    loan.balance.resize(T);
    for (int i = 0; i < T; ++i) loan.balance(i) = balances[static_cast<std::size_t>(i)];
    loan.principal = VectorXd::Constant(T, 100000.0);
    loan.instalment = VectorXd::Constant(T, 0.0);
    loan.receipt = VectorXd::Constant(T, 0.0);
    loan.interest_rate = VectorXd::Constant(T, 0.1);
    loan.in_default.assign(static_cast<std::size_t>(T), false);
    loan.status.assign(static_cast<std::size_t>(T), RecordStatus::Active);
    loan.status.back() = last_status;
    return loan;
}

inline Portfolio make_portfolio(std::vector<LoanHistory> loans) {
    Portfolio p;
    p.loans = std::move(loans);
    p.finalise();
    return p;
}

// Balances printed in the worked example: months 56..69 of a settled
// mortgage, with the small-balance trail starting at month 62.
inline std::vector<double> table1_tail_balances() {
    return {6028.16, 6078.47, 7954.24, 8018.80, 8085.82, 156.47, 163.30,
            170.28,  177.26,  184.33,  191.42,  198.57,  205.73, 0.00};
}

// The same account padded to a full 69-month history: months 1..55 carry
// amortising balances all above any threshold used in the tests.
inline std::vector<double> table1_full_balances() {
    std::vector<double> balances;
    for (int t = 1; t <= 55; ++t)
        balances.push_back(90000.0 - 1000.0 * (t - 1));  // 90000 down to 36000
    for (double b : table1_tail_balances()) balances.push_back(b);
    return balances;
}

}  // namespace truend::testing
