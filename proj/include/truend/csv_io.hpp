#pragma once

#include "truend/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace truend {

enum class IngestErrorKind {
    MissingColumn,
    NonContiguousHistory,
    DuplicateRecord,
    UnparseableRow,
};

class IngestError : public DataError {
public:
    IngestError(IngestErrorKind kind, std::string loan_id, std::size_t line,
                const std::string& message);

    IngestErrorKind kind() const { return kind_; }
    const std::string& loan_id() const { return loan_id_; }
    std::size_t line() const { return line_; }

private:
    IngestErrorKind kind_;
    std::string loan_id_;
    std::size_t line_;
};

struct IngestOptions {
    // Floor negative balances to zero (counted); when false they are an error.
    bool floor_negative_balances = true;
};

struct IngestReport {
    std::uint64_t rows_read = 0;
    std::uint64_t rows_dropped = 0;   // blank lines
    std::uint64_t balances_floored = 0;
    std::uint64_t loans = 0;
    std::uint64_t records = 0;

    std::string to_text() const;  // flat key=value block
};

// Expected header (case-insensitive, any column order, extras ignored):
//   LoanID,Date,Balance,Principal,Instalment,Receipt,InterestRate,InDefault,Status
// Rows may be in any order; per loan the calendar months must be strictly
// consecutive once sorted.
Portfolio ingest_csv(std::istream& in, const IngestOptions& options = {},
                     IngestReport* report = nullptr);
Portfolio ingest_csv_file(const std::string& path,
                          const IngestOptions& options = {},
                          IngestReport* report = nullptr);

// Canonical serialisation: schema above, loans ascending, months ascending,
// two-decimal currency, '.' decimal separator, LF line endings.
void write_portfolio_csv(const Portfolio& portfolio, std::ostream& out);
void write_portfolio_csv_file(const Portfolio& portfolio,
                              const std::string& path);

}  // namespace truend
