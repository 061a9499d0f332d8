// Monte Carlo engine: per-(trial, K) cells are independent and seeded from
// (base_seed, trial, K), so results do not depend on the thread count.
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "geoguard/analysis.hpp"
#include "geoguard/attacks.hpp"
#include "geoguard/detector.hpp"
#include "geoguard/rng.hpp"
#include "geoguard/scenario.hpp"

namespace geoguard {

struct ExperimentPlan {
    ScenarioConfig scenario;
    AttackAssignment attacks;
    DetectorConfig detector;
    std::vector<std::size_t> k_grid;
    std::size_t trials = 1;
    std::uint64_t base_seed = 1;
    double scale_factor = 1.0;  ///< informational; the preset already applied it
    unsigned threads = 0;       ///< 0 = hardware concurrency
    bool exact_feed = false;    ///< use exact post-attack probabilities instead of samples
    ExponentParams exponents;
};

inline void validate(const ExperimentPlan& plan) {
    if (plan.trials == 0) throw DomainError("trials must be at least 1");
    if (plan.k_grid.empty()) throw DomainError("K grid must not be empty");
    for (std::size_t i = 0; i < plan.k_grid.size(); ++i) {
        if (plan.k_grid[i] == 0) throw DomainError("K must be positive");
        if (i > 0 && plan.k_grid[i] <= plan.k_grid[i - 1]) {
            throw DomainError("K grid must be strictly ascending");
        }
    }
    validate(plan.detector);
    validate_scenario(plan.scenario);
    plan.attacks.validate_against(plan.scenario);
}

/// One row of the results table. Absent metrics are NaN.
struct MetricsRow {
    std::size_t k = 0;
    double delta = 0.0;
    double fa_hat = std::numeric_limits<double>::quiet_NaN();
    double fa_se = std::numeric_limits<double>::quiet_NaN();
    double miss_hat = std::numeric_limits<double>::quiet_NaN();
    double miss_se = std::numeric_limits<double>::quiet_NaN();
    double avg_err = 0.0;
    double avg_err_se = 0.0;
    double fa_bound = std::numeric_limits<double>::quiet_NaN();
    double miss_bound = std::numeric_limits<double>::quiet_NaN();
    double pe_bound = std::numeric_limits<double>::quiet_NaN();
};

struct Metrics {
    std::vector<MetricsRow> rows;
    std::optional<double> slope;  ///< least-squares slope of ln(avg_err) against K
};

/// Least-squares slope of ln(y) vs x over the points with y > 0; absent
/// with fewer than two such points.
inline std::optional<double> log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (y[i] > 0.0) pts.emplace_back(x[i], std::log(y[i]));
    }
    if (pts.size() < 2) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (const auto& [a, b] : pts) {
        mx += a;
        my += b;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [a, b] : pts) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    if (sxx == 0.0) return std::nullopt;
    return sxy / sxx;
}

inline std::vector<DistanceEstimate> trial_estimates(const ExperimentPlan& plan, std::size_t k,
                                                     std::size_t trial) {
    const ScenarioConfig& s = plan.scenario;
    if (plan.exact_feed) {
        std::vector<DistanceEstimate> est(s.sensors.size());
        for (std::size_t j = 0; j < s.sensors.size(); ++j) {
            const double tp = post_attack_prob(s, j, plan.attacks.spec_for(s.sensors[j].id));
            est[j] = {attacked_distance(s, j, tp), false};
        }
        return est;
    }
    const auto zeros = zero_counts(s, plan.attacks, k, trial_seed(plan.base_seed, trial, k));
    return estimates_from_counts(s, zeros, k);
}

inline DetectionReport run_trial(const ExperimentPlan& plan, std::size_t k, std::size_t trial) {
    return detect_from_estimates(plan.scenario, plan.detector, trial_estimates(plan, k, trial));
}

namespace detail {

struct CellCounts {
    std::uint64_t false_alarms = 0;
    std::uint64_t misses = 0;
};

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    const std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

inline double binomial_se(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace detail

/// Runs every (trial, K) cell once and evaluates the detector at each delta
/// on the same data, so curves for different delta share their randomness.
inline std::vector<Metrics> sweep_delta(const ExperimentPlan& plan, const std::vector<double>& deltas) {
    validate(plan);
    if (deltas.empty()) throw DomainError("need at least one delta");
    const ScenarioConfig& s = plan.scenario;
    const std::size_t nk = plan.k_grid.size();
    const std::size_t nd = deltas.size();

    std::size_t n_attacked = 0;
    std::size_t n_clean = 0;
    for (const std::size_t j : s.unsecure_indices()) {
        (plan.attacks.attacked(s.sensors[j].id) ? n_attacked : n_clean) += 1;
    }
    const std::size_t n_total = n_attacked + n_clean;

    std::vector<detail::CellCounts> cells(nk * plan.trials * nd);
    detail::parallel_for(nk * plan.trials, plan.threads, [&](std::size_t cell) {
        const std::size_t ki = cell / plan.trials;
        const std::size_t trial = cell % plan.trials;
        const auto est = trial_estimates(plan, plan.k_grid[ki], trial);
        for (std::size_t di = 0; di < nd; ++di) {
            DetectorConfig cfg = plan.detector;
            cfg.delta = deltas[di];
            const DetectionReport report = detect_from_estimates(s, cfg, est);
            detail::CellCounts& c = cells[cell * nd + di];
            for (const SensorDecision& d : report.decisions) {
                if (plan.attacks.attacked(d.id)) c.misses += d.decision == 0;
                else c.false_alarms += d.decision == 1;
            }
        }
    });

    std::vector<Metrics> out(nd);
    for (std::size_t di = 0; di < nd; ++di) {
        std::optional<RateReport> rates;
        try {
            DetectorConfig cfg = plan.detector;
            cfg.delta = deltas[di];
            rates = composite_exponents(s, plan.attacks, cfg, plan.exponents);
        } catch (const Error&) {
            // bounds need subtle attacks and admissible brackets; leave them absent
        }
        std::vector<double> ks, errs;
        for (std::size_t ki = 0; ki < nk; ++ki) {
            std::uint64_t fa = 0, miss = 0;
            for (std::size_t t = 0; t < plan.trials; ++t) {
                const auto& c = cells[(ki * plan.trials + t) * nd + di];
                fa += c.false_alarms;
                miss += c.misses;
            }
            const auto trials = static_cast<double>(plan.trials);
            MetricsRow row;
            row.k = plan.k_grid[ki];
            row.delta = deltas[di];
            if (n_clean > 0) {
                const double n = trials * static_cast<double>(n_clean);
                row.fa_hat = static_cast<double>(fa) / n;
                row.fa_se = detail::binomial_se(row.fa_hat, n);
            }
            if (n_attacked > 0) {
                const double n = trials * static_cast<double>(n_attacked);
                row.miss_hat = static_cast<double>(miss) / n;
                row.miss_se = detail::binomial_se(row.miss_hat, n);
            }
            const double n_all = trials * static_cast<double>(n_total);
            row.avg_err = static_cast<double>(fa + miss) / n_all;
            row.avg_err_se = detail::binomial_se(row.avg_err, n_all);
            if (rates) {
                const auto k = static_cast<double>(row.k);
                double fa_b = 0.0, miss_b = 0.0;
                for (const CompositeRates& c : rates->composite) {
                    if (c.attacked) miss_b += rates->c_e * decay(c.eta1, k);
                    else fa_b += rates->c_e * decay(c.eta0, k);
                }
                if (n_clean > 0) row.fa_bound = fa_b / static_cast<double>(n_clean);
                if (n_attacked > 0) row.miss_bound = miss_b / static_cast<double>(n_attacked);
                row.pe_bound = rates->pe_bound(k);
            }
            ks.push_back(static_cast<double>(row.k));
            errs.push_back(row.avg_err);
            out[di].rows.push_back(row);
        }
        out[di].slope = log_slope(ks, errs);
    }
    return out;
}

inline Metrics estimate_error_probs(const ExperimentPlan& plan) {
    return sweep_delta(plan, {plan.detector.delta}).front();
}

inline Metrics sweep_k(const ExperimentPlan& plan) { return estimate_error_probs(plan); }

}  // namespace geoguard
