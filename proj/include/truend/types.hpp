#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace truend {

using Eigen::VectorXd;
using BoolArray = Eigen::Array<bool, Eigen::Dynamic, 1>;

// Raised for malformed or inconsistent input data (exit code 2 at the CLI).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a computation has no defined result, e.g. no threshold with a
// defined objective (exit code 3 at the CLI).
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Calendar month, stored as year*12 + (month-1).
class YearMonth {
public:
    YearMonth() : index_(0) {}
    explicit YearMonth(int index) : index_(index) {}
    YearMonth(int year, int month) : index_(year * 12 + (month - 1)) {}

    // Accepts "YYYY-MM"; a "-DD" day suffix is tolerated and ignored.
    static std::optional<YearMonth> parse(std::string_view text);

    int index() const { return index_; }
    int year() const { return index_ / 12; }
    int month() const { return index_ % 12 + 1; }

    YearMonth plus(int months) const { return YearMonth(index_ + months); }
    std::string str() const;

    friend bool operator==(YearMonth a, YearMonth b) = default;
    friend auto operator<=>(YearMonth a, YearMonth b) = default;

private:
    int index_;
};

enum class RecordStatus { Active, WriteOff, Settlement };
enum class TerminalStatus { Active, WriteOff, Settlement };

std::optional<RecordStatus> parse_record_status(std::string_view text);
std::string_view record_status_name(RecordStatus s);   // ACTIVE | WOFF | SETTLE
std::string_view terminal_status_name(TerminalStatus s);

// One account's monthly panel, column-wise. Month t (1-based) lives at
// vector index t-1; the calendar month of record t is first_month + (t-1).
// Monetary columns hold cent-exact values. Immutable once built.
struct LoanHistory {
    std::string loan_id;
    YearMonth first_month;
    VectorXd balance;
    VectorXd principal;
    VectorXd instalment;
    VectorXd receipt;
    VectorXd interest_rate;
    std::vector<bool> in_default;
    std::vector<RecordStatus> status;

    int length() const { return static_cast<int>(balance.size()); }

    double balance_at(int t) const { return balance(t - 1); }
    double receipt_at(int t) const { return receipt(t - 1); }
    bool in_default_at(int t) const { return in_default[static_cast<std::size_t>(t - 1)]; }

    // Write-off wins when both write-off and settlement markers appear.
    TerminalStatus terminal_status() const;
    bool terminated() const { return terminal_status() != TerminalStatus::Active; }

    // First `keep` records as a new history. `final_status`, when set,
    // overrides the status of the new last record.
    LoanHistory truncated(int keep,
                          std::optional<RecordStatus> final_status) const;

    bool operator==(const LoanHistory& other) const;
};

// Collection of loans, always held in ascending loan_id order.
struct Portfolio {
    std::vector<LoanHistory> loans;

    std::size_t size() const { return loans.size(); }
    bool empty() const { return loans.empty(); }

    const LoanHistory* find(std::string_view loan_id) const;

    // Sorts by loan_id and enforces uniqueness.
    void finalise();

    bool operator==(const Portfolio& other) const { return loans == other.loans; }
};

}  // namespace truend
