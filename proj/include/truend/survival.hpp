#pragma once

#include "truend/types.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace truend {

enum class SpellOutcome { WriteOff, Censored };

std::string_view spell_outcome_name(SpellOutcome o);

struct Cashflow {
    int month_offset = 0;  // months since default entry
    double amount = 0.0;
};

// A maximal consecutive in-default episode.
struct DefaultSpell {
    std::string loan_id;
    int start = 0;       // period index of default entry
    int duration = 0;    // months until resolution or censoring
    SpellOutcome outcome = SpellOutcome::Censored;
    double ead = 0.0;    // balance at default entry
    std::vector<Cashflow> cashflows;  // non-zero receipts during the spell
};

struct SpellExtraction {
    std::vector<DefaultSpell> spells;
    int skipped_zero_ead = 0;  // spells dropped for non-positive entry balance
};

// One spell per maximal in-default run. The outcome is a write-off only
// when the run reaches the loan's final record and the loan terminates in
// write-off; cures and end-of-data both censor.
SpellExtraction extract_default_spells(const Portfolio& portfolio,
                                       unsigned threads = 1);

// Workout loss: (EAD - sum of receipts discounted to the default point at
// monthly compounding) / EAD. Only defined for written-off spells.
double workout_loss_rate(const DefaultSpell& spell, double annual_rate,
                         bool clamp = false);

// Product-limit estimate tabulated at integer months 0..max duration.
struct SurvivalCurve {
    Eigen::VectorXi time;      // 0..t_max
    Eigen::VectorXi at_risk;
    Eigen::VectorXi events;
    VectorXd survival;         // S(t)
    VectorXd cum_failure;      // F(t) = 1 - S(t)
    VectorXd density;          // f(t) = F(t) - F(t-1)
    VectorXd hazard;           // h(t) = f(t) / S(t-1)

    int max_time() const { return static_cast<int>(time.size()) - 1; }
    // Step evaluation with the last value carried forward beyond t_max.
    double survival_at(int t) const;
    double failure_at(int t) const { return 1.0 - survival_at(t); }
};

// Kaplan-Meier estimator; ties process events before censorings. Small
// cases are evaluated in exact integer arithmetic so censoring-free
// estimates agree bit-for-bit with the empirical survival function.
SurvivalCurve km_estimator(const std::vector<DefaultSpell>& spells);

// Fills density and hazard from the survival column. The hazard conditions
// on survival to t-1 and is zero once S(t-1) reaches zero.
void discrete_hazard(SurvivalCurve& curve);

// Mean absolute difference between two curves on identical grids.
double curve_mae(const VectorXd& a, const VectorXd& b);

// F(t) sampled on t = 0..horizon with step extension.
VectorXd sample_failure(const SurvivalCurve& curve, int horizon);
VectorXd sample_hazard(const SurvivalCurve& curve, int horizon);

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    Eigen::VectorXi counts;
    double mean = 0.0;
    std::size_t n = 0;
};

// Fixed-width histogram plus sample mean. The range defaults to the data
// extent; the final bin includes its upper edge.
Histogram distribution_summary(const std::vector<double>& values, int bins,
                               std::optional<double> lo = std::nullopt,
                               std::optional<double> hi = std::nullopt);

// survival table: t,at_risk,events,S,F,f,h (rows capped at `horizon` when
// non-negative)
void write_survival_csv(const SurvivalCurve& curve, std::ostream& out,
                        int horizon = -1);
void write_survival_csv_file(const SurvivalCurve& curve,
                             const std::string& path, int horizon = -1);

void write_histogram_csv(const Histogram& hist, std::ostream& out);
void write_histogram_csv_file(const Histogram& hist, const std::string& path);

// spells table: loan_id,spell_start,duration,outcome,ead,loss_rate (loss
// only for write-offs, at the given discount rate)
void write_spells_csv(const std::vector<DefaultSpell>& spells,
                      double annual_rate, std::ostream& out);
void write_spells_csv_file(const std::vector<DefaultSpell>& spells,
                           double annual_rate, const std::string& path);

}  // namespace truend
