#include "truend/optimise.hpp"

#include "truend/format.hpp"
#include "truend/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace truend {

SearchSpace SearchSpace::defaults() {
    return SearchSpace{{0,    10,   25,   50,   75,   100,  150,  200,
                        250,  300,  400,  500,  750,  1000, 1250, 1500,
                        1750, 2000, 2500, 3000, 4000, 5000, 7500, 10000}};
}

void SearchSpace::validate() const {
    if (thresholds.empty())
        throw std::invalid_argument("search space must not be empty");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (thresholds[i] < 0.0)
            throw std::invalid_argument("thresholds must be >= 0");
        if (i > 0 && thresholds[i] <= thresholds[i - 1])
            throw std::invalid_argument("thresholds must be strictly increasing");
    }
}

namespace {

// Per-threshold scan results, enough to finish the evaluation for any w
// without touching the portfolio again. Aggregation runs in ascending
// loan_id order so results do not depend on thread count.
struct ThresholdScan {
    double threshold = 0.0;
    int loan_count = 0;
    std::vector<std::pair<double, double>> tzb_pairs;  // (M1, M2) per TZB account
    double pre_mean_sum = 0.0;                         // sum of M2 over all accounts
    long long age_sum = 0;                             // ages after hypothetical truncation
    long long tzb_length_sum = 0;
    int short_pre_windows = 0;
};

ThresholdScan scan_threshold(const Portfolio& portfolio, double threshold,
                             int tau, int min_len, unsigned threads) {
    const std::size_t n = portfolio.size();
    std::vector<TzbAssessment> assessments(n);
    TzbParams params{threshold, tau, min_len, 0.0};
    parallel_for(n, threads, [&](std::size_t i) {
        assessments[i] = assess(portfolio.loans[i], params);
    });

    ThresholdScan scan;
    scan.threshold = threshold;
    scan.loan_count = static_cast<int>(n);
    for (const TzbAssessment& a : assessments) {
        scan.pre_mean_sum += a.pre_mean;
        scan.age_sum += a.true_end();
        if (a.pre_window_short) ++scan.short_pre_windows;
        if (a.is_tzb()) {
            scan.tzb_pairs.emplace_back(*a.tzb_mean, a.pre_mean);
            scan.tzb_length_sum += a.tzb_length();
        }
    }
    return scan;
}

ThresholdEvaluation finish_evaluation(const ThresholdScan& scan, double weight) {
    ThresholdEvaluation ev;
    ev.threshold = scan.threshold;
    ev.tzb_count = static_cast<int>(scan.tzb_pairs.size());
    ev.pre_mean = scan.pre_mean_sum / scan.loan_count;
    ev.prevalence = static_cast<double>(ev.tzb_count) / scan.loan_count;
    ev.mean_age = static_cast<double>(scan.age_sum) / scan.loan_count;
    ev.short_pre_windows = scan.short_pre_windows;

    if (ev.tzb_count > 0) {
        double m1_sum = 0.0;
        for (const auto& [m1, m2] : scan.tzb_pairs) m1_sum += m1;
        ev.tzb_mean = m1_sum / ev.tzb_count;
        ev.contamination = portfolio_contamination(*ev.tzb_mean, ev.pre_mean);
        ev.mean_tzb_length =
            static_cast<double>(scan.tzb_length_sum) / ev.tzb_count;

        double obj_sum = 0.0;
        for (const auto& [m1, m2] : scan.tzb_pairs)
            obj_sum += loan_objective(m1, m2, weight);
        const double mean = obj_sum / ev.tzb_count;
        ev.objective_mean = mean;
        if (ev.tzb_count >= 2) {
            double sq = 0.0;
            for (const auto& [m1, m2] : scan.tzb_pairs) {
                const double d = loan_objective(m1, m2, weight) - mean;
                sq += d * d;
            }
            const double stddev = std::sqrt(sq / (ev.tzb_count - 1));
            ev.objective_stddev = stddev;
            // a zero spread would make f unbounded; left undefined instead
            if (stddev > 0.0) ev.objective = obj_sum / stddev;
        }
    }
    return ev;
}

}  // namespace

PortfolioMeans portfolio_means(const Portfolio& portfolio, double threshold,
                               int tau, int min_len) {
    if (portfolio.empty()) throw std::invalid_argument("empty portfolio");
    const ThresholdScan scan = scan_threshold(portfolio, threshold, tau, min_len, 1);
    PortfolioMeans out;
    out.tzb_count = static_cast<int>(scan.tzb_pairs.size());
    out.pre_mean = scan.pre_mean_sum / scan.loan_count;
    if (out.tzb_count > 0) {
        double m1_sum = 0.0;
        for (const auto& [m1, m2] : scan.tzb_pairs) m1_sum += m1;
        out.tzb_mean = m1_sum / out.tzb_count;
    }
    return out;
}

std::optional<double> portfolio_contamination(double tzb_mean, double pre_mean) {
    return contamination_degree(tzb_mean, pre_mean);
}

CalibratedWeight calibrate_weight(
    const std::vector<std::pair<double, std::optional<double>>>& contamination_curve) {
    if (contamination_curve.empty())
        throw std::invalid_argument("empty contamination curve");
    CalibratedWeight out;
    const std::size_t n = contamination_curve.size();
    std::size_t lo = 0;
    while (lo < n && !contamination_curve[lo].second) ++lo;
    if (lo == n)
        throw ComputationError(
            "contamination degree undefined at every threshold; cannot "
            "calibrate weight");
    std::size_t hi = n - 1;
    while (!contamination_curve[hi].second) --hi;
    out.fallback_low = lo != 0;
    out.fallback_high = hi != n - 1;
    out.value =
        (*contamination_curve[lo].second + *contamination_curve[hi].second) / 2.0;
    return out;
}

ThresholdEvaluation evaluate_threshold(const Portfolio& portfolio,
                                       const TzbParams& params,
                                       unsigned threads) {
    if (portfolio.empty()) throw std::invalid_argument("empty portfolio");
    params.validate();
    const ThresholdScan scan = scan_threshold(portfolio, params.threshold,
                                              params.tau, params.min_len, threads);
    return finish_evaluation(scan, params.weight);
}

OptimisationOutcome optimise(const Portfolio& portfolio,
                             const SearchSpace& space, int tau, int min_len,
                             std::optional<double> weight, unsigned threads,
                             double region_quantile) {
    if (portfolio.empty()) throw std::invalid_argument("empty portfolio");
    space.validate();

    std::vector<ThresholdScan> scans(space.thresholds.size());
    for (std::size_t i = 0; i < space.thresholds.size(); ++i)
        scans[i] = scan_threshold(portfolio, space.thresholds[i], tau, min_len,
                                  threads);

    OptimisationOutcome outcome;

    // contamination curve, for the midpoint and for reporting
    std::vector<std::pair<double, std::optional<double>>> contamination;
    contamination.reserve(scans.size());
    for (const ThresholdScan& scan : scans) {
        std::optional<double> phi;
        if (!scan.tzb_pairs.empty()) {
            double m1_sum = 0.0;
            for (const auto& [m1, m2] : scan.tzb_pairs) m1_sum += m1;
            phi = portfolio_contamination(
                m1_sum / static_cast<double>(scan.tzb_pairs.size()),
                scan.pre_mean_sum / scan.loan_count);
        }
        contamination.emplace_back(scan.threshold, phi);
    }

    bool any_phi = false;
    for (const auto& [b, phi] : contamination) any_phi |= phi.has_value();
    if (any_phi) {
        const CalibratedWeight cw = calibrate_weight(contamination);
        outcome.midpoint = cw.value;
        outcome.weight_fallback_low = cw.fallback_low;
        outcome.weight_fallback_high = cw.fallback_high;
    }
    if (weight) {
        outcome.weight_used = *weight;
    } else {
        if (!outcome.midpoint)
            throw ComputationError(
                "weight calibration failed: no threshold has a defined "
                "contamination degree");
        outcome.weight_used = *outcome.midpoint;
    }

    outcome.curve.reserve(scans.size());
    for (const ThresholdScan& scan : scans)
        outcome.curve.push_back(finish_evaluation(scan, outcome.weight_used));

    // argmax over defined objectives; ties keep the smallest threshold
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < outcome.curve.size(); ++i) {
        const auto& f = outcome.curve[i].objective;
        if (!f) continue;
        if (!best || *f > *outcome.curve[*best].objective) best = i;
    }
    if (!best)
        throw ComputationError(
            "no threshold yields a defined objective (fewer than two TZB "
            "accounts everywhere)");
    outcome.best_threshold = outcome.curve[*best].threshold;

    std::vector<std::pair<double, double>> defined;
    for (const ThresholdEvaluation& ev : outcome.curve)
        if (ev.objective) defined.emplace_back(ev.threshold, *ev.objective);
    if (defined.size() < 2)
        outcome.region = {outcome.best_threshold};
    else
        outcome.region = optimal_region(defined, region_quantile);
    return outcome;
}

std::vector<double> optimal_region(
    const std::vector<std::pair<double, double>>& objective_curve,
    double quantile) {
    if (objective_curve.size() < 2)
        throw std::invalid_argument("optimal region needs at least two points");
    if (quantile <= 0.0 || quantile >= 1.0)
        throw std::invalid_argument("quantile must lie in (0,1)");

    double b_min = objective_curve.front().first, b_max = b_min;
    double f_min = objective_curve.front().second, f_max = f_min;
    std::size_t best = 0;
    for (std::size_t i = 0; i < objective_curve.size(); ++i) {
        const auto& [b, f] = objective_curve[i];
        b_min = std::min(b_min, b);
        b_max = std::max(b_max, b);
        f_min = std::min(f_min, f);
        f_max = std::max(f_max, f);
        if (f > objective_curve[best].second) best = i;
    }

    std::vector<double> region;
    if (f_max == f_min) {  // degenerate curve: everything is optimal
        for (const auto& [b, f] : objective_curve) region.push_back(b);
        return region;
    }

    const double b_range = b_max - b_min;
    auto norm_b = [&](double b) { return b_range > 0.0 ? (b - b_min) / b_range : 0.0; };
    auto norm_f = [&](double f) { return (f - f_min) / (f_max - f_min); };

    const double bx = norm_b(objective_curve[best].first);
    const double fx = norm_f(objective_curve[best].second);
    std::vector<double> distances;
    distances.reserve(objective_curve.size());
    for (const auto& [b, f] : objective_curve)
        distances.push_back(std::hypot(norm_b(b) - bx, norm_f(f) - fx));

    // linear-interpolation quantile over the sorted distances
    std::vector<double> sorted = distances;
    std::sort(sorted.begin(), sorted.end());
    const double h = static_cast<double>(sorted.size() - 1) * quantile;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    double cutoff = sorted[lo];
    if (lo + 1 < sorted.size()) cutoff += frac * (sorted[lo + 1] - sorted[lo]);

    for (std::size_t i = 0; i < objective_curve.size(); ++i)
        if (distances[i] <= cutoff) region.push_back(objective_curve[i].first);
    return region;
}

void write_curve_csv(const std::vector<ThresholdEvaluation>& curve,
                     std::ostream& out) {
    out << "b,n_s,l_bar,s_bar,f,m1_bar,m2_bar,phi_bar,prevalence,mean_age,"
           "mean_tzb_len\n";
    auto opt = [](const std::optional<double>& v) {
        return v ? format_double(*v) : std::string();
    };
    for (const ThresholdEvaluation& ev : curve) {
        out << format_double(ev.threshold) << ',' << ev.tzb_count << ','
            << opt(ev.objective_mean) << ',' << opt(ev.objective_stddev) << ','
            << opt(ev.objective) << ',' << opt(ev.tzb_mean) << ','
            << format_double(ev.pre_mean) << ',' << opt(ev.contamination) << ','
            << format_double(ev.prevalence) << ',' << format_double(ev.mean_age)
            << ',' << opt(ev.mean_tzb_length) << '\n';
    }
}

void write_curve_csv_file(const std::vector<ThresholdEvaluation>& curve,
                          const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    write_curve_csv(curve, out);
    if (!out) throw DataError("failed writing " + path);
}

}  // namespace truend
