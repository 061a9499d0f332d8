// World description: sensors, the secure pair, the region of interest and
// the signal constants, together with the derived distance/probability
// brackets and the standing geometric assumptions.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "geoguard/errors.hpp"
#include "geoguard/geometry.hpp"
#include "geoguard/noise_model.hpp"
#include "geoguard/point.hpp"

namespace geoguard {

struct SensorSpec {
    int id = 0;
    Point position;
    double threshold = 1.0;
    NoiseModel noise;
    bool secure = false;
};

struct RoiDisc {
    Point center;
    double radius = 1.0;

    bool contains(Point p) const { return distance(p, center) <= radius; }
};

struct ScenarioConfig {
    std::vector<SensorSpec> sensors;
    RoiDisc roi;
    Point target;
    double p0 = 1.0;
    double d0 = 1.0;
    double gamma = 2.0;
    double upsilon1 = 1.0;
    double upsilon2 = 1.0;
    double kappa = 0.005;

    double upsilon() const { return std::min(upsilon1, upsilon2); }

    std::size_t index_of(int id) const {
        for (std::size_t i = 0; i < sensors.size(); ++i) {
            if (sensors[i].id == id) return i;
        }
        throw MissingSensorData("no sensor with id " + std::to_string(id));
    }

    /// Indices of the two secure sensors, in file order.
    std::pair<std::size_t, std::size_t> secure_indices() const {
        std::vector<std::size_t> found;
        for (std::size_t i = 0; i < sensors.size(); ++i) {
            if (sensors[i].secure) found.push_back(i);
        }
        if (found.size() != 2) {
            throw InvalidScenario("expected exactly two secure sensors, found " +
                                  std::to_string(found.size()));
        }
        return {found[0], found[1]};
    }

    std::vector<std::size_t> unsecure_indices() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < sensors.size(); ++i) {
            if (!sensors[i].secure) out.push_back(i);
        }
        return out;
    }
};

/// Noise-free received signal P0 (D0/D)^gamma at distance D.
inline double mean_signal(const ScenarioConfig& s, double dist) {
    return s.p0 * std::pow(s.d0 / dist, s.gamma);
}

/// Closed half-space bounded by the secure-sensor line, on the ROI side.
inline HalfSpace secure_half_space(const ScenarioConfig& s) {
    const auto [a, b] = s.secure_indices();
    return half_space_containing(s.sensors[a].position, s.sensors[b].position, s.roi.center);
}

inline DistanceBounds compute_distance_bounds(const ScenarioConfig& s) {
    if (s.sensors.empty()) throw InvalidScenario("scenario has no sensors");
    DistanceBounds out;
    out.d_lower = std::numeric_limits<double>::infinity();
    out.d_upper = 0.0;
    for (const SensorSpec& sensor : s.sensors) {
        const double c = distance(sensor.position, s.roi.center);
        if (c <= s.roi.radius) {
            throw InvalidScenario("sensor " + std::to_string(sensor.id) + " lies inside the ROI");
        }
        out.d_lower = std::min(out.d_lower, c - s.roi.radius);
        out.d_upper = std::max(out.d_upper, c + s.roi.radius);
    }
    const auto [a, b] = s.secure_indices();
    out.d_secure = distance(s.sensors[a].position, s.sensors[b].position);
    return out;
}

struct RhoBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// Zero-bit probability bracket of sensor j over the whole ROI.
inline RhoBounds rho_bounds(const ScenarioConfig& s, std::size_t j, const DistanceBounds& b) {
    const SensorSpec& sensor = s.sensors.at(j);
    const RhoBounds rho{sensor.noise.cdf(sensor.threshold - mean_signal(s, b.d_lower)),
                        sensor.noise.cdf(sensor.threshold - mean_signal(s, b.d_upper))};
    const double top = sensor.noise.cdf(sensor.threshold);
    if (!(0.0 < rho.lower && rho.lower < rho.upper && rho.upper < top)) {
        throw InvalidScenario("sensor " + std::to_string(sensor.id) +
                              ": probability ordering 0 < rho_L < rho_U < F(tau) fails");
    }
    return rho;
}

inline RhoBounds rho_bounds(const ScenarioConfig& s, std::size_t j) {
    return rho_bounds(s, j, compute_distance_bounds(s));
}

/// Structural checks. Throws InvalidScenario on the first violation.
inline void validate_scenario(const ScenarioConfig& s) {
    if (!(s.p0 > 0.0) || !(s.d0 > 0.0) || !(s.gamma > 0.0)) {
        throw InvalidScenario("P0, D0 and gamma must be positive");
    }
    if (!(s.upsilon1 > 0.0) || !(s.upsilon2 > 0.0) || !(s.kappa > 0.0)) {
        throw InvalidScenario("upsilon1, upsilon2 and kappa must be positive");
    }
    if (!(s.roi.radius > 0.0) || !is_finite(s.roi.center)) {
        throw InvalidScenario("ROI radius must be positive");
    }
    if (!s.roi.contains(s.target)) throw InvalidScenario("target lies outside the ROI");
    std::vector<int> ids;
    for (const SensorSpec& sensor : s.sensors) {
        if (!is_finite(sensor.position) || !std::isfinite(sensor.threshold)) {
            throw InvalidScenario("sensor " + std::to_string(sensor.id) + " has non-finite data");
        }
        try {
            validate(sensor.noise);
        } catch (const DomainError& e) {
            throw InvalidScenario("sensor " + std::to_string(sensor.id) + ": " + e.what());
        }
        ids.push_back(sensor.id);
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
        throw InvalidScenario("duplicate sensor ids");
    }
    const auto [a, b] = s.secure_indices();
    if (s.sensors[a].position == s.sensors[b].position) {
        throw InvalidScenario("secure sensors coincide");
    }
    const DistanceBounds bounds = compute_distance_bounds(s);
    for (std::size_t j = 0; j < s.sensors.size(); ++j) rho_bounds(s, j, bounds);
}

struct AssumptionReport {
    DistanceBounds bounds;
    bool separated = false;     ///< D_S > D_U - D_L + 2 upsilon1
    double separated_margin = 0.0;
    bool far_enough = false;    ///< min over ROI of D_{N+1} + D_{N+2} > D_S + 2 upsilon2
    double far_margin = 0.0;
    double focal_sum_min = 0.0;
    double focal_sum_tolerance = 0.0;  ///< sampling error bound on focal_sum_min
    bool one_side = false;      ///< ROI strictly on one side of the secure line
    double side_margin = 0.0;

    bool all() const { return separated && far_enough && one_side; }

    std::vector<std::string> warnings() const {
        std::vector<std::string> out;
        if (!separated) {
            out.push_back("secure sensors not widely separated: D_S=" + fmt(bounds.d_secure) +
                          " vs D_U-D_L+2*upsilon1=" + fmt(bounds.d_secure - separated_margin));
        }
        if (!far_enough) {
            out.push_back("ROI too close to the secure baseline: min(D1+D2)=" +
                          fmt(focal_sum_min) + " vs D_S+2*upsilon2=" +
                          fmt(focal_sum_min - far_margin));
        }
        if (!one_side) out.push_back("ROI is not strictly inside one half-plane of the secure line");
        return out;
    }

private:
    static std::string fmt(double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return buf;
    }
};

/// Diagnostic only: violations are reported, never thrown.
///
/// The focal-sum minimum is taken over 10^4 boundary points plus the center.
/// The sum is convex, so its minimum over the disc is either on the boundary
/// or equals D_S (when the focal segment crosses the disc); the boundary scan
/// is accurate to 2*pi*radius/10^4 since the sum is 2-Lipschitz.
inline AssumptionReport validate_assumptions(const ScenarioConfig& s) {
    AssumptionReport r;
    r.bounds = compute_distance_bounds(s);
    const auto [a, b] = s.secure_indices();
    const Point s1 = s.sensors[a].position;
    const Point s2 = s.sensors[b].position;

    r.separated_margin = r.bounds.d_secure - (r.bounds.d_upper - r.bounds.d_lower + 2.0 * s.upsilon1);
    r.separated = r.separated_margin > 0.0;

    constexpr int boundary_points = 10000;
    const auto focal = [&](Point p) { return distance(p, s1) + distance(p, s2); };
    double best = focal(s.roi.center);
    for (int i = 0; i < boundary_points; ++i) {
        const double ang = two_pi * i / boundary_points;
        best = std::min(best, focal(s.roi.center + s.roi.radius * Point{std::cos(ang), std::sin(ang)}));
    }
    // the focal segment itself attains D_S if it meets the disc
    const Point seg = s2 - s1;
    const double t = std::clamp(dot(s.roi.center - s1, seg) / dot(seg, seg), 0.0, 1.0);
    if (distance(s1 + t * seg, s.roi.center) <= s.roi.radius) best = r.bounds.d_secure;
    r.focal_sum_min = best;
    r.focal_sum_tolerance = 2.0 * std::numbers::pi * s.roi.radius / boundary_points;
    r.far_margin = best - (r.bounds.d_secure + 2.0 * s.upsilon2);
    r.far_enough = r.far_margin > 0.0;

    const HalfSpace line = half_space_containing(s1, s2, s.roi.center);
    r.side_margin = line.signed_distance(s.roi.center) - s.roi.radius;
    r.one_side = r.side_margin > 0.0;
    return r;
}

}  // namespace geoguard
