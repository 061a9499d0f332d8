#pragma once

#include <cmath>
#include <ostream>

namespace geoguard {

/// Planar position in meters.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }
    friend constexpr bool operator==(Point, Point) = default;

    friend std::ostream& operator<<(std::ostream& os, Point p) {
        return os << '(' << p.x << ", " << p.y << ')';
    }
};

constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double squared_norm(Point p) { return p.x * p.x + p.y * p.y; }

/// Euclidean distance.
inline double distance(Point a, Point b) { return norm(a - b); }

inline bool is_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Extreme sensor-to-ROI distances and the secure-sensor baseline.
struct DistanceBounds {
    double d_lower = 0.0;   ///< D_L: closest any sensor can be to a target in the ROI
    double d_upper = 0.0;   ///< D_U: farthest any sensor can be from a target in the ROI
    double d_secure = 0.0;  ///< D_S: separation of the two secure sensors
};

}  // namespace geoguard
