#include "truend/csv_io.hpp"

#include "truend/format.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace truend {

namespace {

const char* kColumnNames[] = {"loanid",     "date",    "balance",
                              "principal",  "instalment", "receipt",
                              "interestrate", "indefault", "status"};
constexpr int kColumnCount = 9;

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

struct RawRecord {
    YearMonth month;
    std::size_t line;
    double balance, principal, instalment, receipt, rate;
    bool in_default;
    RecordStatus status;
};

const char* kindName(IngestErrorKind kind) {
    switch (kind) {
        case IngestErrorKind::MissingColumn: return "MissingColumn";
        case IngestErrorKind::NonContiguousHistory: return "NonContiguousHistory";
        case IngestErrorKind::DuplicateRecord: return "DuplicateRecord";
        case IngestErrorKind::UnparseableRow: return "UnparseableRow";
    }
    return "IngestError";
}

std::string describe(IngestErrorKind kind, const std::string& loan_id,
                     std::size_t line, const std::string& message) {
    std::ostringstream os;
    os << kindName(kind) << ": " << message;
    if (!loan_id.empty()) os << " (loan " << loan_id << ")";
    if (line > 0) os << " at line " << line;
    return os.str();
}

}  // namespace

IngestError::IngestError(IngestErrorKind kind, std::string loan_id,
                         std::size_t line, const std::string& message)
    : DataError(describe(kind, loan_id, line, message)),
      kind_(kind),
      loan_id_(std::move(loan_id)),
      line_(line) {}

std::string IngestReport::to_text() const {
    std::ostringstream os;
    os << "rows_read=" << rows_read << '\n'
       << "rows_dropped=" << rows_dropped << '\n'
       << "balances_floored=" << balances_floored << '\n'
       << "loans=" << loans << '\n'
       << "records=" << records << '\n';
    return os.str();
}

Portfolio ingest_csv(std::istream& in, const IngestOptions& options,
                     IngestReport* report) {
    IngestReport local;
    IngestReport& rep = report ? *report : local;
    rep = IngestReport{};

    std::string line;
    if (!std::getline(in, line))
        throw IngestError(IngestErrorKind::MissingColumn, "", 0, "empty input, no header row");

    // map header -> column index
    int column_at[kColumnCount];
    std::fill(std::begin(column_at), std::end(column_at), -1);
    {
        const auto fields = split_fields(line);
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const std::string name = lower(trim(fields[i]));
            for (int c = 0; c < kColumnCount; ++c)
                if (name == kColumnNames[c]) column_at[c] = static_cast<int>(i);
        }
        for (int c = 0; c < kColumnCount; ++c)
            if (column_at[c] < 0)
                throw IngestError(IngestErrorKind::MissingColumn, "", 1,
                                  std::string("header lacks column ") + kColumnNames[c]);
    }

    std::map<std::string, std::vector<RawRecord>> by_loan;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            ++rep.rows_dropped;
            continue;
        }
        ++rep.rows_read;
        const auto fields = split_fields(line);
        auto field = [&](int c) -> std::string_view {
            const int idx = column_at[c];
            if (idx >= static_cast<int>(fields.size())) return {};
            return trim(fields[idx]);
        };

        const std::string loan_id(field(0));
        auto fail = [&](const std::string& msg) -> IngestError {
            return IngestError(IngestErrorKind::UnparseableRow, loan_id, line_no, msg);
        };
        if (loan_id.empty()) throw fail("empty LoanID");

        RawRecord rec;
        rec.line = line_no;
        const auto ym = YearMonth::parse(field(1));
        if (!ym) throw fail("bad Date, expected YYYY-MM");
        rec.month = *ym;
        if (!parse_currency(field(2), rec.balance)) throw fail("bad Balance");
        if (!parse_currency(field(3), rec.principal)) throw fail("bad Principal");
        if (!parse_currency(field(4), rec.instalment)) throw fail("bad Instalment");
        if (!parse_currency(field(5), rec.receipt)) throw fail("bad Receipt");
        if (!parse_double(field(6), rec.rate)) throw fail("bad InterestRate");
        if (rec.principal < 0.0) throw fail("negative Principal");
        if (rec.instalment < 0.0) throw fail("negative Instalment");
        if (rec.rate < 0.0) throw fail("negative InterestRate");
        const auto dft = field(7);
        if (dft == "0") rec.in_default = false;
        else if (dft == "1") rec.in_default = true;
        else throw fail("bad InDefault, expected 0 or 1");
        const auto st = parse_record_status(field(8));
        if (!st) throw fail("bad Status, expected ACTIVE|WOFF|SETTLE");
        rec.status = *st;

        if (rec.balance < 0.0) {
            if (!options.floor_negative_balances) throw fail("negative Balance");
            rec.balance = 0.0;
            ++rep.balances_floored;
        }
        by_loan[loan_id].push_back(rec);
    }

    Portfolio portfolio;
    portfolio.loans.reserve(by_loan.size());
    for (auto& [loan_id, records] : by_loan) {
        std::stable_sort(records.begin(), records.end(),
                         [](const RawRecord& a, const RawRecord& b) {
                             return a.month < b.month;
                         });
        for (std::size_t i = 1; i < records.size(); ++i) {
            if (records[i].month == records[i - 1].month)
                throw IngestError(IngestErrorKind::DuplicateRecord, loan_id,
                                  records[i].line,
                                  "duplicate month " + records[i].month.str());
            if (records[i].month.index() != records[i - 1].month.index() + 1)
                throw IngestError(
                    IngestErrorKind::NonContiguousHistory, loan_id, records[i].line,
                    "gap between " + records[i - 1].month.str() + " and " +
                        records[i].month.str());
        }

        LoanHistory loan;
        loan.loan_id = loan_id;
        loan.first_month = records.front().month;
        const int T = static_cast<int>(records.size());
        loan.balance.resize(T);
        loan.principal.resize(T);
        loan.instalment.resize(T);
        loan.receipt.resize(T);
        loan.interest_rate.resize(T);
        loan.in_default.resize(records.size());
        loan.status.resize(records.size());
        for (int t = 0; t < T; ++t) {
            const RawRecord& r = records[static_cast<std::size_t>(t)];
            loan.balance(t) = r.balance;
            loan.principal(t) = r.principal;
            loan.instalment(t) = r.instalment;
            loan.receipt(t) = r.receipt;
            loan.interest_rate(t) = r.rate;
            loan.in_default[static_cast<std::size_t>(t)] = r.in_default;
            loan.status[static_cast<std::size_t>(t)] = r.status;
        }
        rep.records += static_cast<std::uint64_t>(T);
        portfolio.loans.push_back(std::move(loan));
    }
    rep.loans = portfolio.loans.size();
    portfolio.finalise();
    return portfolio;
}

Portfolio ingest_csv_file(const std::string& path, const IngestOptions& options,
                          IngestReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open input file: " + path);
    return ingest_csv(in, options, report);
}

void write_portfolio_csv(const Portfolio& portfolio, std::ostream& out) {
    out << "LoanID,Date,Balance,Principal,Instalment,Receipt,InterestRate,"
           "InDefault,Status\n";
    for (const LoanHistory& loan : portfolio.loans) {
        for (int t = 1; t <= loan.length(); ++t) {
            const int i = t - 1;
            out << loan.loan_id << ',' << loan.first_month.plus(i).str() << ','
                << format_currency(loan.balance(i)) << ','
                << format_currency(loan.principal(i)) << ','
                << format_currency(loan.instalment(i)) << ','
                << format_currency(loan.receipt(i)) << ','
                << format_double(loan.interest_rate(i)) << ','
                << (loan.in_default[static_cast<std::size_t>(i)] ? '1' : '0') << ','
                << record_status_name(loan.status[static_cast<std::size_t>(i)])
                << '\n';
        }
    }
}

void write_portfolio_csv_file(const Portfolio& portfolio,
                              const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    write_portfolio_csv(portfolio, out);
    if (!out) throw DataError("failed writing " + path);
}

}  // namespace truend
