#include "truend/synthgen.hpp"

#include "truend/format.hpp"
#include "truend/parallel.hpp"
#include "truend/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace truend {

namespace {

double quantize(double v) {
    return static_cast<double>(std::llround(v * 100.0)) / 100.0;
}

std::string loan_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "L%07d", index + 1);
    return std::string(buf);
}

// annuity payment for principal P at monthly rate i over n months
double annuity(double principal, double monthly_rate, int n) {
    if (monthly_rate <= 0.0) return principal / n;
    const double denom = 1.0 - std::pow(1.0 + monthly_rate, -n);
    return principal * monthly_rate / denom;
}

struct Draft {
    LoanHistory loan;
    int true_end = 0;
    bool terminated = false;
    bool settled = false;  // closure by settlement or maturity (not write-off)
};

// Simulates one loan to its genuine closure (or the observation window).
Draft simulate_loan(const SynthParams& p, int index) {
    Xoshiro256ss rng(derive_seed(p.seed, static_cast<std::uint64_t>(index)));

    const double principal = quantize(rng.uniform(p.principal_min, p.principal_max));
    const double annual =
        std::round(rng.uniform(p.annual_rate_min, p.annual_rate_max) * 1e4) / 1e4;
    const double monthly = annual / 12.0;
    const double instalment = quantize(annuity(principal, monthly, p.term_months));

    std::vector<double> balances, receipts;
    std::vector<bool> defaults;
    std::vector<RecordStatus> statuses;

    double balance = principal;
    bool in_default = false;
    bool winding_down = false;
    double winddown_floor = 0.0;
    int default_age = 0;
    bool closed = false;
    bool write_off = false;

    const int hard_cap = p.term_months + p.max_default_months + 36;
    for (int t = 1; t <= hard_cap && !closed; ++t) {
        const double accrued = quantize(balance * (1.0 + monthly));
        double receipt = 0.0;
        RecordStatus status = RecordStatus::Active;

        if (winding_down) {
            const double kept = quantize(
                accrued * rng.uniform(p.winddown_factor_min, p.winddown_factor_max));
            if (kept < winddown_floor) {
                const double residual =
                    quantize(rng.uniform(0.0, p.settle_residual_cap));
                receipt = quantize(accrued - residual);
                balance = residual;
                status = RecordStatus::Settlement;
                closed = true;
            } else {
                receipt = quantize(accrued - kept);
                balance = kept;
            }
        } else if (in_default) {
            ++default_age;
            const bool forced = default_age >= p.max_default_months;
            if (forced || rng.bernoulli(p.p_writeoff)) {
                receipt = quantize(
                    rng.uniform(p.writeoff_recovery_min, p.writeoff_recovery_max) *
                    accrued);
                balance = 0.0;
                status = RecordStatus::WriteOff;
                closed = true;
                write_off = true;
            } else if (p.p_cure > 0.0 && rng.bernoulli(p.p_cure)) {
                in_default = false;
                default_age = 0;
                receipt = instalment;
                balance = quantize(accrued - instalment);
            } else {
                if (rng.bernoulli(p.recovery_prob))
                    receipt = quantize(rng.uniform(0.0, p.recovery_cap_frac * accrued));
                balance = std::max(0.0, quantize(accrued - receipt));
            }
        } else if (rng.bernoulli(p.p_settle)) {
            if (accrued > p.winddown_floor_max && rng.bernoulli(p.p_winddown)) {
                winding_down = true;
                winddown_floor = quantize(
                    rng.uniform(p.winddown_floor_min, p.winddown_floor_max));
                const double kept = quantize(
                    accrued *
                    rng.uniform(p.winddown_factor_min, p.winddown_factor_max));
                receipt = quantize(accrued - kept);
                balance = std::max(kept, winddown_floor);
            } else {
                const double residual =
                    quantize(rng.uniform(0.0, p.settle_residual_cap));
                receipt = quantize(accrued - residual);
                balance = residual;
                status = RecordStatus::Settlement;
                closed = true;
            }
        } else if (balance >= p.default_balance_floor * principal &&
                   rng.bernoulli(p.p_default)) {
            in_default = true;
            default_age = 1;
            if (rng.bernoulli(p.recovery_prob))
                receipt = quantize(rng.uniform(0.0, p.recovery_cap_frac * accrued));
            balance = std::max(0.0, quantize(accrued - receipt));
        } else if (t >= p.term_months || accrued <= instalment) {
            // final scheduled payment; a small residue stays on the closure
            // record as with any other settlement
            const double residual = quantize(
                rng.uniform(0.0, std::min(p.settle_residual_cap, accrued)));
            receipt = quantize(accrued - residual);
            balance = residual;
            status = RecordStatus::Settlement;
            closed = true;
        } else {
            receipt = instalment;
            balance = quantize(accrued - instalment);
        }

        balances.push_back(balance);
        receipts.push_back(receipt);
        defaults.push_back(in_default);  // still true on the write-off month
        statuses.push_back(status);
    }

    Draft draft;
    draft.terminated = closed;
    draft.settled = closed && !write_off;
    draft.true_end = static_cast<int>(balances.size());

    LoanHistory& loan = draft.loan;
    loan.loan_id = loan_name(index);
    loan.first_month = YearMonth(2007, 1);
    const int T = static_cast<int>(balances.size());
    loan.balance.resize(T);
    loan.principal = VectorXd::Constant(T, principal);
    loan.instalment = VectorXd::Constant(T, instalment);
    loan.receipt.resize(T);
    loan.interest_rate = VectorXd::Constant(T, annual);
    loan.in_default = defaults;
    loan.status = statuses;
    for (int t = 0; t < T; ++t) {
        loan.balance(t) = balances[static_cast<std::size_t>(t)];
        loan.receipt(t) = receipts[static_cast<std::size_t>(t)];
    }
    return draft;
}

// Appends the trailing corruption after the genuine closure record.
void inject_tail(const SynthParams& p, int index, Draft& draft, int tail_len,
                 bool unrecorded) {
    LoanHistory& loan = draft.loan;
    const int T = loan.length();
    const bool write_off = !draft.settled;
    Xoshiro256ss rng(
        derive_seed(p.seed ^ 0x7A11C0DEULL, static_cast<std::uint64_t>(index)));

    const int new_len = T + tail_len;
    VectorXd balance(new_len), principal(new_len), instalment(new_len),
        receipt(new_len), rate(new_len);
    balance.head(T) = loan.balance;
    principal.head(T) = loan.principal;
    instalment.head(T) = loan.instalment;
    receipt.head(T) = loan.receipt;
    rate.head(T) = loan.interest_rate;

    const double base = rng.uniform(0.0, 0.8 * p.tail_balance_cap);
    double level = base;
    for (int k = 0; k < tail_len; ++k) {
        const int idx = T + k;
        const bool last = k == tail_len - 1;
        balance(idx) = last ? 0.0
                            : std::min(p.tail_balance_cap, quantize(level));
        level *= 1.0 + p.tail_accrual;
        principal(idx) = loan.principal(0);
        instalment(idx) = 0.0;
        receipt(idx) = 0.0;
        rate(idx) = loan.interest_rate(0);
        loan.in_default.push_back(write_off);
        loan.status.push_back(RecordStatus::Active);
    }
    loan.balance = std::move(balance);
    loan.principal = std::move(principal);
    loan.instalment = std::move(instalment);
    loan.receipt = std::move(receipt);
    loan.interest_rate = std::move(rate);

    // delayed closure: the terminal marker moves to the observed end,
    // unless the closure was never recorded at all
    const RecordStatus marker = loan.status[static_cast<std::size_t>(T - 1)];
    loan.status[static_cast<std::size_t>(T - 1)] = RecordStatus::Active;
    if (!unrecorded) loan.status.back() = marker;
}

}  // namespace

void SynthParams::validate() const {
    auto prob = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (n_loans < 1) throw std::invalid_argument("n_loans must be >= 1");
    if (term_months < 2) throw std::invalid_argument("term_months must be >= 2");
    if (principal_min <= 0.0 || principal_max < principal_min)
        throw std::invalid_argument("bad principal range");
    if (annual_rate_min < 0.0 || annual_rate_max < annual_rate_min)
        throw std::invalid_argument("bad rate range");
    if (!prob(p_default) || !prob(p_cure) || !prob(p_settle) ||
        !prob(p_writeoff) || !prob(tzb_fraction) ||
        !prob(unrecorded_closure_fraction) || !prob(recovery_prob) ||
        !prob(p_winddown))
        throw std::invalid_argument("probabilities must lie in [0,1]");
    if (winddown_factor_min <= 0.0 || winddown_factor_max >= 1.0 ||
        winddown_factor_max < winddown_factor_min)
        throw std::invalid_argument("bad winddown factor range");
    if (winddown_floor_min < 0.0 || winddown_floor_max < winddown_floor_min)
        throw std::invalid_argument("bad winddown floor range");
    if (max_default_months < 1)
        throw std::invalid_argument("max_default_months must be >= 1");
    if (tail_mean_months < 1.0)
        throw std::invalid_argument("tail_mean_months must be >= 1");
    if (tail_max_months < 1)
        throw std::invalid_argument("tail_max_months must be >= 1");
    if (tail_balance_cap < 0.0)
        throw std::invalid_argument("tail_balance_cap must be >= 0");
    if (settle_residual_cap < 0.0)
        throw std::invalid_argument("settle_residual_cap must be >= 0");
    if (window_months < 0)
        throw std::invalid_argument("window_months must be >= 0");
}

std::pair<Portfolio, GroundTruth> generate(const SynthParams& params,
                                           unsigned threads) {
    params.validate();

    const std::size_t n = static_cast<std::size_t>(params.n_loans);
    std::vector<Draft> drafts(n);
    parallel_for(n, threads, [&](std::size_t i) {
        drafts[i] = simulate_loan(params, static_cast<int>(i));
        if (params.window_months > 0 &&
            drafts[i].loan.length() > params.window_months) {
            drafts[i].loan =
                drafts[i].loan.truncated(params.window_months, std::nullopt);
            drafts[i].terminated = false;  // closure fell beyond the window
            drafts[i].true_end = params.window_months;
        }
    });

    // pick exactly round(fraction * terminated) loans for corruption
    std::vector<std::size_t> terminated;
    for (std::size_t i = 0; i < n; ++i)
        if (drafts[i].terminated) terminated.push_back(i);
    const std::size_t k = static_cast<std::size_t>(
        std::llround(params.tzb_fraction * static_cast<double>(terminated.size())));
    Xoshiro256ss pick_rng(derive_seed(params.seed ^ 0x5E1EC7ULL, 0));
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + pick_rng.bounded(terminated.size() - i);
        std::swap(terminated[i], terminated[j]);
    }

    std::vector<int> tail_len(n, 0);
    std::vector<bool> unrecorded(n, false);
    const double tail_p = 1.0 / params.tail_mean_months;
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t idx = terminated[i];
        Xoshiro256ss rng(derive_seed(params.seed ^ 0x7E51C7EDULL,
                                     static_cast<std::uint64_t>(idx)));
        int len = std::min(params.tail_max_months, rng.geometric(tail_p));
        if (params.window_months > 0)
            len = std::min(len, params.window_months - drafts[idx].loan.length());
        if (len < 1) continue;
        tail_len[idx] = len;
        unrecorded[idx] = drafts[idx].settled &&
                          rng.bernoulli(params.unrecorded_closure_fraction);
    }

    parallel_for(n, threads, [&](std::size_t i) {
        if (tail_len[i] > 0)
            inject_tail(params, static_cast<int>(i), drafts[i], tail_len[i],
                        unrecorded[i]);
    });

    Portfolio portfolio;
    GroundTruth truth;
    portfolio.loans.reserve(n);
    truth.loans.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        LoanTruth lt;
        lt.loan_id = drafts[i].loan.loan_id;
        lt.true_end = drafts[i].true_end;
        lt.injected = tail_len[i] > 0;
        lt.tail_length = tail_len[i];
        truth.loans.push_back(std::move(lt));
        portfolio.loans.push_back(std::move(drafts[i].loan));
    }
    portfolio.finalise();
    std::sort(truth.loans.begin(), truth.loans.end(),
              [](const LoanTruth& a, const LoanTruth& b) {
                  return a.loan_id < b.loan_id;
              });
    return {std::move(portfolio), std::move(truth)};
}

const LoanTruth* GroundTruth::find(std::string_view loan_id) const {
    auto it = std::lower_bound(loans.begin(), loans.end(), loan_id,
                               [](const LoanTruth& l, std::string_view id) {
                                   return l.loan_id < id;
                               });
    if (it == loans.end() || it->loan_id != loan_id) return nullptr;
    return &*it;
}

int GroundTruth::injected_count() const {
    int n = 0;
    for (const LoanTruth& l : loans) n += l.injected ? 1 : 0;
    return n;
}

int GroundTruth::max_tail_length() const {
    int n = 0;
    for (const LoanTruth& l : loans) n = std::max(n, l.tail_length);
    return n;
}

RecoveryMetrics evaluate_recovery(const std::vector<TzbAssessment>& assessments,
                                  const GroundTruth& truth) {
    if (assessments.size() != truth.loans.size())
        throw DataError("assessment and truth loan sets differ in size");

    RecoveryMetrics m;
    long long abs_error = 0;
    int uninjected = 0;
    for (const TzbAssessment& a : assessments) {
        const LoanTruth* t = truth.find(a.loan_id);
        if (!t) throw DataError("loan missing from truth: " + a.loan_id);
        const int estimated_end = a.true_end();
        if (t->injected) {
            ++m.injected;
            if (a.is_tzb() && estimated_end == t->true_end) ++m.exact;
            abs_error += std::abs(estimated_end - t->true_end);
        } else {
            ++uninjected;
            if (a.is_tzb()) ++m.false_positives;
        }
    }
    if (m.injected > 0) {
        m.exact_recovery_rate = static_cast<double>(m.exact) / m.injected;
        m.mean_abs_endpoint_error =
            static_cast<double>(abs_error) / m.injected;
    }
    if (uninjected > 0)
        m.false_positive_rate =
            static_cast<double>(m.false_positives) / uninjected;
    return m;
}

void write_truth_csv(const GroundTruth& truth, std::ostream& out) {
    out << "LoanID,TrueEnd,Injected,TailLen\n";
    for (const LoanTruth& l : truth.loans)
        out << l.loan_id << ',' << l.true_end << ',' << (l.injected ? 1 : 0)
            << ',' << l.tail_length << '\n';
}

void write_truth_csv_file(const GroundTruth& truth, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    write_truth_csv(truth, out);
    if (!out) throw DataError("failed writing " + path);
}

GroundTruth read_truth_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open truth file: " + path);
    std::string line;
    if (!std::getline(in, line) ||
        line.find("LoanID,TrueEnd,Injected,TailLen") != 0)
        throw DataError("bad truth file header in " + path);
    GroundTruth truth;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n'))
            line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        LoanTruth lt;
        std::string field;
        long long v1, v2, v3;
        const bool ok = std::getline(ss, lt.loan_id, ',') &&
                        std::getline(ss, field, ',') && parse_int(field, v1) &&
                        std::getline(ss, field, ',') && parse_int(field, v2) &&
                        std::getline(ss, field) && parse_int(field, v3);
        if (!ok)
            throw DataError("bad truth row at line " + std::to_string(line_no) +
                            " in " + path);
        lt.true_end = static_cast<int>(v1);
        lt.injected = v2 != 0;
        lt.tail_length = static_cast<int>(v3);
        truth.loans.push_back(std::move(lt));
    }
    std::sort(truth.loans.begin(), truth.loans.end(),
              [](const LoanTruth& a, const LoanTruth& b) {
                  return a.loan_id < b.loan_id;
              });
    return truth;
}

}  // namespace truend
