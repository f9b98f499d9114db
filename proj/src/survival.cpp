#include "truend/survival.hpp"

#include "truend/format.hpp"
#include "truend/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace truend {

std::string_view spell_outcome_name(SpellOutcome o) {
    return o == SpellOutcome::WriteOff ? "WriteOff" : "Censored";
}

SpellExtraction extract_default_spells(const Portfolio& portfolio,
                                       unsigned threads) {
    struct PerLoan {
        std::vector<DefaultSpell> spells;
        int skipped = 0;
    };
    const std::size_t n = portfolio.size();
    std::vector<PerLoan> per_loan(n);

    parallel_for(n, threads, [&](std::size_t i) {
        const LoanHistory& loan = portfolio.loans[i];
        const int T = loan.length();
        const bool written_off =
            loan.terminal_status() == TerminalStatus::WriteOff;
        int t = 1;
        while (t <= T) {
            if (!loan.in_default_at(t)) {
                ++t;
                continue;
            }
            const int start = t;
            while (t <= T && loan.in_default_at(t)) ++t;
            const int end = t - 1;

            DefaultSpell spell;
            spell.loan_id = loan.loan_id;
            spell.start = start;
            spell.duration = end - start + 1;
            spell.outcome = (end == T && written_off) ? SpellOutcome::WriteOff
                                                      : SpellOutcome::Censored;
            spell.ead = loan.balance_at(start);
            if (spell.ead <= 0.0) {
                ++per_loan[i].skipped;
                continue;
            }
            for (int u = start; u <= end; ++u) {
                const double r = loan.receipt_at(u);
                if (r != 0.0) spell.cashflows.push_back({u - start, r});
            }
            per_loan[i].spells.push_back(std::move(spell));
        }
    });

    SpellExtraction out;
    for (PerLoan& pl : per_loan) {
        out.skipped_zero_ead += pl.skipped;
        for (DefaultSpell& s : pl.spells) out.spells.push_back(std::move(s));
    }
    return out;
}

double workout_loss_rate(const DefaultSpell& spell, double annual_rate,
                         bool clamp) {
    if (spell.outcome != SpellOutcome::WriteOff)
        throw std::invalid_argument("workout loss undefined for a spell not "
                                    "ending in write-off (loan " +
                                    spell.loan_id + ")");
    if (annual_rate < 0.0)
        throw std::invalid_argument("annual_rate must be >= 0");
    if (spell.ead <= 0.0)
        throw std::invalid_argument("spell EAD must be positive");

    const double monthly = 1.0 + annual_rate / 12.0;
    double recovered = 0.0;
    for (const Cashflow& cf : spell.cashflows)
        recovered += cf.amount / std::pow(monthly, cf.month_offset);
    double loss = (spell.ead - recovered) / spell.ead;
    if (clamp) loss = std::clamp(loss, 0.0, 1.0);
    return loss;
}

double SurvivalCurve::survival_at(int t) const {
    if (t < 0) return 1.0;
    const int last = max_time();
    return survival(std::min(t, last));
}

SurvivalCurve km_estimator(const std::vector<DefaultSpell>& spells) {
    if (spells.empty())
        throw std::invalid_argument("no spells to estimate from");

    int t_max = 0;
    for (const DefaultSpell& s : spells) {
        if (s.duration < 1)
            throw std::invalid_argument("spell duration must be >= 1");
        t_max = std::max(t_max, s.duration);
    }

    std::vector<int> deaths(static_cast<std::size_t>(t_max) + 1, 0);
    std::vector<int> leavers(static_cast<std::size_t>(t_max) + 1, 0);
    for (const DefaultSpell& s : spells) {
        if (s.outcome == SpellOutcome::WriteOff) ++deaths[s.duration];
        ++leavers[s.duration];
    }

    SurvivalCurve curve;
    curve.time.resize(t_max + 1);
    curve.at_risk.resize(t_max + 1);
    curve.events.resize(t_max + 1);
    curve.survival.resize(t_max + 1);
    curve.cum_failure.resize(t_max + 1);
    curve.density = VectorXd::Zero(t_max + 1);
    curve.hazard = VectorXd::Zero(t_max + 1);

    curve.time(0) = 0;
    curve.at_risk(0) = static_cast<int>(spells.size());
    curve.events(0) = 0;
    curve.survival(0) = 1.0;
    curve.cum_failure(0) = 0.0;

    // Exact rational running product while numerator and denominator stay
    // below 2^53; beyond that the product continues in double precision.
    unsigned long long num = 1, den = 1;
    bool exact = true;
    double survival = 1.0;
    constexpr unsigned long long kExactCap = 1ULL << 53;

    int at_risk = static_cast<int>(spells.size());
    for (int t = 1; t <= t_max; ++t) {
        const int d = deaths[t];
        curve.time(t) = t;
        curve.at_risk(t) = at_risk;
        curve.events(t) = d;
        if (d > 0) {
            if (exact) {
                unsigned __int128 new_num =
                    static_cast<unsigned __int128>(num) * (at_risk - d);
                unsigned __int128 new_den =
                    static_cast<unsigned __int128>(den) * at_risk;
                if (new_num == 0) {
                    num = 0;
                    den = 1;
                    survival = 0.0;
                } else {
                    unsigned __int128 a = new_num, b = new_den;
                    while (b != 0) {
                        const unsigned __int128 r = a % b;
                        a = b;
                        b = r;
                    }
                    new_num /= a;
                    new_den /= a;
                    if (new_num < kExactCap && new_den < kExactCap) {
                        num = static_cast<unsigned long long>(new_num);
                        den = static_cast<unsigned long long>(new_den);
                        survival =
                            static_cast<double>(num) / static_cast<double>(den);
                    } else {
                        exact = false;
                        survival = survival * static_cast<double>(at_risk - d) /
                                   static_cast<double>(at_risk);
                    }
                }
            } else {
                survival = survival * static_cast<double>(at_risk - d) /
                           static_cast<double>(at_risk);
            }
        }
        curve.survival(t) = survival;
        curve.cum_failure(t) = 1.0 - survival;
        at_risk -= leavers[t];
    }
    discrete_hazard(curve);
    return curve;
}

void discrete_hazard(SurvivalCurve& curve) {
    const int t_max = curve.max_time();
    curve.density = VectorXd::Zero(t_max + 1);
    curve.hazard = VectorXd::Zero(t_max + 1);
    for (int t = 1; t <= t_max; ++t) {
        const double prev = curve.survival(t - 1);
        curve.density(t) = prev - curve.survival(t);
        curve.hazard(t) = prev > 0.0 ? curve.density(t) / prev : 0.0;
    }
}

double curve_mae(const VectorXd& a, const VectorXd& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("curves on different grids");
    if (a.size() == 0) throw std::invalid_argument("empty grid");
    return (a - b).cwiseAbs().mean();
}

VectorXd sample_failure(const SurvivalCurve& curve, int horizon) {
    if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    VectorXd out(horizon + 1);
    for (int t = 0; t <= horizon; ++t) out(t) = curve.failure_at(t);
    return out;
}

VectorXd sample_hazard(const SurvivalCurve& curve, int horizon) {
    if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    VectorXd out = VectorXd::Zero(horizon + 1);
    const int last = curve.max_time();
    for (int t = 1; t <= std::min(horizon, last); ++t) out(t) = curve.hazard(t);
    return out;  // beyond t_max the risk set is empty, hazard stays zero
}

Histogram distribution_summary(const std::vector<double>& values, int bins,
                               std::optional<double> lo,
                               std::optional<double> hi) {
    if (values.empty()) throw std::invalid_argument("no values to summarise");
    if (bins < 1) throw std::invalid_argument("bins must be >= 1");

    Histogram hist;
    hist.n = values.size();
    hist.mean = std::accumulate(values.begin(), values.end(), 0.0) /
                static_cast<double>(values.size());
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    hist.lo = lo.value_or(*mn);
    hist.hi = hi.value_or(*mx);
    if (hist.hi < hist.lo)
        throw std::invalid_argument("histogram range is inverted");
    hist.counts = Eigen::VectorXi::Zero(bins);

    if (hist.hi == hist.lo) {  // degenerate range: everything in one bin
        for (double v : values)
            if (v == hist.lo) hist.counts(0) += 1;
        return hist;
    }
    const double width = (hist.hi - hist.lo) / bins;
    for (double v : values) {
        if (v < hist.lo || v > hist.hi) continue;
        int idx = static_cast<int>((v - hist.lo) / width);
        if (idx >= bins) idx = bins - 1;  // upper edge joins the last bin
        hist.counts(idx) += 1;
    }
    return hist;
}

void write_survival_csv(const SurvivalCurve& curve, std::ostream& out,
                        int horizon) {
    out << "t,at_risk,events,S,F,f,h\n";
    int last = curve.max_time();
    if (horizon >= 0) last = std::min(last, horizon);
    for (int t = 0; t <= last; ++t) {
        out << t << ',' << curve.at_risk(t) << ',' << curve.events(t) << ','
            << format_double(curve.survival(t)) << ','
            << format_double(curve.cum_failure(t)) << ','
            << format_double(curve.density(t)) << ','
            << format_double(curve.hazard(t)) << '\n';
    }
}

void write_survival_csv_file(const SurvivalCurve& curve,
                             const std::string& path, int horizon) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    write_survival_csv(curve, out, horizon);
    if (!out) throw DataError("failed writing " + path);
}

void write_histogram_csv(const Histogram& hist, std::ostream& out) {
    out << "bin_lo,bin_hi,count\n";
    const int bins = static_cast<int>(hist.counts.size());
    if (hist.hi == hist.lo) {
        out << format_double(hist.lo) << ',' << format_double(hist.hi) << ','
            << hist.counts(0) << '\n';
        return;
    }
    const double width = (hist.hi - hist.lo) / bins;
    for (int i = 0; i < bins; ++i) {
        out << format_double(hist.lo + i * width) << ','
            << format_double(i + 1 == bins ? hist.hi : hist.lo + (i + 1) * width)
            << ',' << hist.counts(i) << '\n';
    }
}

void write_histogram_csv_file(const Histogram& hist, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    write_histogram_csv(hist, out);
    if (!out) throw DataError("failed writing " + path);
}

void write_spells_csv(const std::vector<DefaultSpell>& spells,
                      double annual_rate, std::ostream& out) {
    out << "loan_id,spell_start,duration,outcome,ead,loss_rate\n";
    for (const DefaultSpell& s : spells) {
        out << s.loan_id << ',' << s.start << ',' << s.duration << ','
            << spell_outcome_name(s.outcome) << ',' << format_currency(s.ead)
            << ',';
        if (s.outcome == SpellOutcome::WriteOff)
            out << format_double(workout_loss_rate(s, annual_rate));
        out << '\n';
    }
}

void write_spells_csv_file(const std::vector<DefaultSpell>& spells,
                           double annual_rate, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    write_spells_csv(spells, annual_rate, out);
    if (!out) throw DataError("failed writing " + path);
}

}  // namespace truend
