#include "truend/types.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace truend {

std::optional<YearMonth> YearMonth::parse(std::string_view text) {
    if (text.size() > 7) {
        // tolerate a day suffix such as "2011-08-31"
        if (text.size() != 10 || text[7] != '-' ||
            !std::isdigit(static_cast<unsigned char>(text[8])) ||
            !std::isdigit(static_cast<unsigned char>(text[9])))
            return std::nullopt;
        text = text.substr(0, 7);
    }
    if (text.size() != 7 || text[4] != '-') return std::nullopt;
    int year = 0;
    int month = 0;
    auto r1 = std::from_chars(text.data(), text.data() + 4, year);
    auto r2 = std::from_chars(text.data() + 5, text.data() + 7, month);
    if (r1.ec != std::errc() || r1.ptr != text.data() + 4) return std::nullopt;
    if (r2.ec != std::errc() || r2.ptr != text.data() + 7) return std::nullopt;
    if (month < 1 || month > 12 || year < 0) return std::nullopt;
    return YearMonth(year, month);
}

std::string YearMonth::str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year(), month());
    return std::string(buf);
}

std::optional<RecordStatus> parse_record_status(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "ACTIVE") return RecordStatus::Active;
    if (upper == "WOFF") return RecordStatus::WriteOff;
    if (upper == "SETTLE") return RecordStatus::Settlement;
    return std::nullopt;
}

std::string_view record_status_name(RecordStatus s) {
    switch (s) {
        case RecordStatus::Active: return "ACTIVE";
        case RecordStatus::WriteOff: return "WOFF";
        case RecordStatus::Settlement: return "SETTLE";
    }
    return "ACTIVE";
}

std::string_view terminal_status_name(TerminalStatus s) {
    switch (s) {
        case TerminalStatus::Active: return "Active";
        case TerminalStatus::WriteOff: return "WriteOff";
        case TerminalStatus::Settlement: return "Settlement";
    }
    return "Active";
}

TerminalStatus LoanHistory::terminal_status() const {
    bool settle = false;
    for (RecordStatus s : status) {
        if (s == RecordStatus::WriteOff) return TerminalStatus::WriteOff;
        if (s == RecordStatus::Settlement) settle = true;
    }
    return settle ? TerminalStatus::Settlement : TerminalStatus::Active;
}

LoanHistory LoanHistory::truncated(
    int keep, std::optional<RecordStatus> final_status) const {
    if (keep < 1 || keep > length())
        throw std::invalid_argument("truncated(): keep out of range for loan " + loan_id);
    LoanHistory out;
    out.loan_id = loan_id;
    out.first_month = first_month;
    out.balance = balance.head(keep);
    out.principal = principal.head(keep);
    out.instalment = instalment.head(keep);
    out.receipt = receipt.head(keep);
    out.interest_rate = interest_rate.head(keep);
    out.in_default.assign(in_default.begin(), in_default.begin() + keep);
    out.status.assign(status.begin(), status.begin() + keep);
    if (final_status) out.status.back() = *final_status;
    return out;
}

static bool same_column(const VectorXd& a, const VectorXd& b) {
    return a.size() == b.size() && (a.array() == b.array()).all();
}

bool LoanHistory::operator==(const LoanHistory& other) const {
    return loan_id == other.loan_id && first_month == other.first_month &&
           same_column(balance, other.balance) &&
           same_column(principal, other.principal) &&
           same_column(instalment, other.instalment) &&
           same_column(receipt, other.receipt) &&
           same_column(interest_rate, other.interest_rate) &&
           in_default == other.in_default && status == other.status;
}

const LoanHistory* Portfolio::find(std::string_view loan_id) const {
    auto it = std::lower_bound(
        loans.begin(), loans.end(), loan_id,
        [](const LoanHistory& l, std::string_view id) { return l.loan_id < id; });
    if (it == loans.end() || it->loan_id != loan_id) return nullptr;
    return &*it;
}

void Portfolio::finalise() {
    std::sort(loans.begin(), loans.end(),
              [](const LoanHistory& a, const LoanHistory& b) {
                  return a.loan_id < b.loan_id;
              });
    for (std::size_t i = 1; i < loans.size(); ++i)
        if (loans[i].loan_id == loans[i - 1].loan_id)
            throw DataError("duplicate loan_id in portfolio: " + loans[i].loan_id);
}

}  // namespace truend
