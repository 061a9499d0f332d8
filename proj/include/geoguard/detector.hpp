// Geometric-inconsistency attack detector and the admissible-delta machinery.
//
// Sensor j is declared unattacked (0) iff the circle of radius D^_j around
// it passes through the common area of the two secure sensors' rings of
// half-width delta, everything clipped to the ROI side of the secure line.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geoguard/attacks.hpp"
#include "geoguard/errors.hpp"
#include "geoguard/geometry.hpp"
#include "geoguard/measurement.hpp"
#include "geoguard/scenario.hpp"

namespace geoguard {

enum class DetectMethod { analytic, discretized };

inline std::string_view to_string(DetectMethod m) {
    return m == DetectMethod::analytic ? "analytic" : "discretized";
}

inline DetectMethod detect_method_from_string(std::string_view name) {
    if (name == "analytic") return DetectMethod::analytic;
    if (name == "discretized") return DetectMethod::discretized;
    throw DomainError("unknown detection method '" + std::string(name) + "'");
}

struct DetectorConfig {
    double delta = 1.0;
    DetectMethod method = DetectMethod::analytic;
    std::size_t m = 200000;
};

inline void validate(const DetectorConfig& cfg) {
    if (!(cfg.delta > 0.0) || !std::isfinite(cfg.delta)) throw DomainError("delta must be positive");
    if (cfg.method == DetectMethod::discretized && cfg.m < 3) {
        throw DomainError("discretized detection needs M >= 3");
    }
}

struct SensorDecision {
    int id = 0;
    int decision = 0;  ///< 1 = attacked
    double d_hat = 0.0;
    bool clamped = false;
};

struct DetectionReport {
    std::vector<SensorDecision> decisions;  ///< unsecure sensors, ascending id
    int secure_id1 = 0;
    int secure_id2 = 0;
    double secure_radius1 = 0.0;
    double secure_radius2 = 0.0;
    bool secure_clamped = false;
    DetectMethod method = DetectMethod::analytic;
    double delta = 0.0;

    const SensorDecision& of(int id) const {
        for (const auto& d : decisions) {
            if (d.id == id) return d;
        }
        throw MissingSensorData("no decision for sensor " + std::to_string(id));
    }
};

namespace detail {

// Tables are immutable once built and shared by every caller using that M.
inline std::shared_ptr<const UnitCircleTable> circle_table(std::size_t m) {
    static std::mutex mutex;
    static std::map<std::size_t, std::shared_ptr<const UnitCircleTable>> cache;
    const std::lock_guard lock(mutex);
    auto& slot = cache[m];
    if (!slot) slot = std::make_shared<const UnitCircleTable>(m);
    return slot;
}

}  // namespace detail

/// Detection from per-sensor distance estimates indexed like s.sensors.
inline DetectionReport detect_from_estimates(const ScenarioConfig& s, const DetectorConfig& cfg,
                                             std::span<const DistanceEstimate> estimates) {
    validate(cfg);
    if (estimates.size() != s.sensors.size()) {
        throw MissingSensorData("need one distance estimate per sensor");
    }
    const auto [a, b] = s.secure_indices();
    const HalfSpace clip = secure_half_space(s);
    const Ring r1{s.sensors[a].position, estimates[a].distance, cfg.delta, clip};
    const Ring r2{s.sensors[b].position, estimates[b].distance, cfg.delta, clip};
    std::shared_ptr<const UnitCircleTable> table;
    if (cfg.method == DetectMethod::discretized) table = detail::circle_table(cfg.m);

    DetectionReport report;
    report.secure_id1 = s.sensors[a].id;
    report.secure_id2 = s.sensors[b].id;
    report.secure_radius1 = estimates[a].distance;
    report.secure_radius2 = estimates[b].distance;
    report.secure_clamped = estimates[a].clamped || estimates[b].clamped;
    report.method = cfg.method;
    report.delta = cfg.delta;
    for (std::size_t j = 0; j < s.sensors.size(); ++j) {
        if (s.sensors[j].secure) continue;
        const ClippedCircle circle{s.sensors[j].position, estimates[j].distance, clip};
        const bool meets = cfg.method == DetectMethod::analytic
                               ? circle_meets_region_analytic(circle, r1, r2)
                               : circle_meets_region_discretized(circle, r1, r2, *table);
        report.decisions.push_back({s.sensors[j].id, meets ? 0 : 1, estimates[j].distance,
                                    estimates[j].clamped});
    }
    std::sort(report.decisions.begin(), report.decisions.end(),
              [](const SensorDecision& x, const SensorDecision& y) { return x.id < y.id; });
    return report;
}

/// Distance estimates from per-sensor zero counts out of K samples.
inline std::vector<DistanceEstimate> estimates_from_counts(const ScenarioConfig& s,
                                                           std::span<const std::uint64_t> zeros,
                                                           std::size_t k) {
    std::vector<DistanceEstimate> out(s.sensors.size());
    for (std::size_t j = 0; j < s.sensors.size(); ++j) {
        const EmpiricalFreq f{static_cast<double>(zeros[j]) / static_cast<double>(k), k};
        out[j] = nmle_distance(s, j, f);
    }
    return out;
}

inline DetectionReport detect_all(const ScenarioConfig& s, const DetectorConfig& cfg,
                                  const QuantizedDataset& data) {
    std::vector<DistanceEstimate> est(s.sensors.size());
    for (std::size_t j = 0; j < s.sensors.size(); ++j) {
        est[j] = nmle_distance(s, j, empirical_freq(data.bits_of(s.sensors[j].id)));
    }
    return detect_from_estimates(s, cfg, est);
}

inline int detect_sensor(const ScenarioConfig& s, const DetectorConfig& cfg,
                         const QuantizedDataset& data, int id) {
    const std::size_t j = s.index_of(id);
    if (s.sensors[j].secure) throw DomainError("secure sensors are not classified");
    const auto [a, b] = s.secure_indices();
    // only the three sensors involved are read
    std::vector<DistanceEstimate> est(s.sensors.size(), DistanceEstimate{1.0, false});
    for (const std::size_t i : {j, a, b}) {
        est[i] = nmle_distance(s, i, empirical_freq(data.bits_of(s.sensors[i].id)));
    }
    return detect_from_estimates(s, cfg, est).of(id).decision;
}

/// Infinite-K limit: every sensor reports exactly its post-attack zero-bit
/// probability, so the estimates equal the attacked distances.
inline DetectionReport detect_exact(const ScenarioConfig& s, const DetectorConfig& cfg,
                                    const AttackAssignment& attacks) {
    std::vector<DistanceEstimate> est(s.sensors.size());
    for (std::size_t j = 0; j < s.sensors.size(); ++j) {
        const double tp = post_attack_prob(s, j, attacks.spec_for(s.sensors[j].id));
        est[j] = {attacked_distance(s, j, tp), false};
    }
    return detect_from_estimates(s, cfg, est);
}

// -----------------------------------------------------------------------------
// Minimum distortion of a significant attack and the admissible delta
// -----------------------------------------------------------------------------

/// kappa D0 P0^(1/gamma) [tau - F^{-1}(rho_L)]^(-(gamma+1)/gamma) / (gamma sup f)
/// over [F^{-1}(rho_L), F^{-1}(rho_U)]. The 1/gamma comes from differentiating
/// (tau - x)^(-1/gamma); without it the separation |D~ - D| > lambda_j fails.
inline double lambda_j(const ScenarioConfig& s, std::size_t j, double kappa,
                       const DistanceBounds& bounds) {
    if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
    const SensorSpec& sensor = s.sensors.at(j);
    RhoBounds rho;
    try {
        rho = rho_bounds(s, j, bounds);
    } catch (const InvalidScenario& e) {
        throw DomainError(e.what());
    }
    const double x_lo = sensor.noise.inv_cdf(rho.lower);
    const double x_hi = sensor.noise.inv_cdf(rho.upper);
    const double peak = density_extremum(sensor.noise, x_lo, x_hi, Extremum::sup);
    return kappa * s.d0 * std::pow(s.p0, 1.0 / s.gamma) *
           std::pow(sensor.threshold - x_lo, -(s.gamma + 1.0) / s.gamma) / (s.gamma * peak);
}

inline double lambda_j(const ScenarioConfig& s, std::size_t j, double kappa) {
    return lambda_j(s, j, kappa, compute_distance_bounds(s));
}

/// Smallest lambda_j over the unsecure sensors.
inline double lambda_min(const ScenarioConfig& s, double kappa) {
    const DistanceBounds bounds = compute_distance_bounds(s);
    double out = std::numeric_limits<double>::infinity();
    for (const std::size_t j : s.unsecure_indices()) out = std::min(out, lambda_j(s, j, kappa, bounds));
    return out;
}

/// Supremum of the delta values for which a significant attack is
/// guaranteed to push the circle out of the ring intersection.
inline double delta_admissible(double d_upper, double d_secure, double upsilon, double lambda) {
    const double a = 2.0 * d_upper + upsilon;
    const double bracket =
        std::sqrt(a) * std::sqrt((6.0 * d_upper + 3.0 * upsilon) / (2.0 * d_secure) *
                                     (upsilon / d_secure + 1.0) +
                                 3.0) +
        0.5 * std::sqrt(upsilon);
    return std::min(upsilon, lambda * lambda / (bracket * bracket));
}

inline double delta_admissible(const ScenarioConfig& s, double kappa) {
    const DistanceBounds bounds = compute_distance_bounds(s);
    return delta_admissible(bounds.d_upper, bounds.d_secure, s.upsilon(), lambda_min(s, kappa));
}

}  // namespace geoguard
