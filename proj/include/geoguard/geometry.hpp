// Geometric kernel of the consistency detector: half-plane clipped circles,
// rings and balls, circle-circle intersection, and the test deciding whether
// a sensor's range circle passes through the common area of two rings.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "geoguard/errors.hpp"
#include "geoguard/point.hpp"

namespace geoguard {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// =============================================================================
// Shapes
// =============================================================================

/// Closed half-plane on one side of the line through `a` and `b`.
/// `side` = +1 selects the points to the left of a->b, -1 those to the right.
struct HalfSpace {
    Point a;
    Point b{1.0, 0.0};
    int side = 1;

    /// Unit normal pointing into the half-plane.
    Point inward_normal() const {
        const Point t = b - a;
        const double len = norm(t);
        return (side >= 0 ? 1.0 : -1.0) / len * Point{-t.y, t.x};
    }

    /// Signed distance to the boundary line, non-negative inside.
    double signed_distance(Point p) const { return dot(inward_normal(), p - a); }

    bool contains(Point p) const { return signed_distance(p) >= 0.0; }

    /// y >= 0.
    static HalfSpace upper() { return {{0.0, 0.0}, {1.0, 0.0}, 1}; }
};

/// Half-space on the side of line ab that contains `p`; points on the line
/// select the left side.
inline HalfSpace half_space_containing(Point a, Point b, Point p) {
    if (a == b) throw DomainError("half-space anchors must differ");
    return {a, b, cross(b - a, p - a) >= 0.0 ? 1 : -1};
}

/// Circle clipped to a half-plane.
struct ClippedCircle {
    Point center;
    double radius = 0.0;
    HalfSpace clip;
};

/// Clipped annulus {p in clip : max(0, R - delta) <= |p - c| <= R + delta}.
/// A half-width larger than the radius degenerates to a clipped disc.
struct Ring {
    Point center;
    double radius = 0.0;
    double half_width = 0.0;
    HalfSpace clip;

    double inner() const { return std::max(0.0, radius - half_width); }
    double outer() const { return radius + half_width; }

    bool contains(Point p) const {
        if (!clip.contains(p)) return false;
        const double dev = distance(p, center) - radius;
        return -half_width <= dev && dev <= half_width;
    }
};

struct Ball {
    Point center;
    double radius = 0.0;
    HalfSpace clip;

    bool contains(Point p) const { return clip.contains(p) && distance(p, center) <= radius; }
};

/// Membership in the common area of two rings, using the clip of `r1`.
inline bool ring_member(Point p, const Ring& r1, const Ring& r2) {
    if (!r1.clip.contains(p)) return false;
    const double dev1 = distance(p, r1.center) - r1.radius;
    const double dev2 = distance(p, r2.center) - r2.radius;
    return -r1.half_width <= dev1 && dev1 <= r1.half_width &&
           -r2.half_width <= dev2 && dev2 <= r2.half_width;
}

/// Smallest constraint slack of `p` for the region clip ∩ r1 ∩ r2 (positive
/// inside, negative outside). Every term is 1-Lipschitz in `p`.
inline double region_slack(Point p, const Ring& r1, const Ring& r2) {
    double slack = r1.clip.signed_distance(p);
    for (const Ring* r : {&r1, &r2}) {
        const double d = distance(p, r->center);
        slack = std::min(slack, r->outer() - d);
        if (r->inner() > 0.0) slack = std::min(slack, d - r->inner());
    }
    return slack;
}

// =============================================================================
// Circle-circle intersection
// =============================================================================

struct IntersectionPoint {
    Point point;
    bool tangent = false;  ///< the two circles touch in a single point
};

/// Intersection of circles (c1, r1) and (c2, r2) lying in `clip`.
///
/// Works in the frame where c1 is the origin and c2 sits on the positive
/// x-axis at the center distance d: x = (r1^2 - r2^2 + d^2) / (2d) and
/// y = +-sqrt(r1^2 - x^2). Of the two mirror images the one deeper inside the
/// clip is returned.
inline IntersectionPoint circle_circle_intersection(Point c1, double r1, Point c2, double r2,
                                                    const HalfSpace& clip) {
    const Point axis = c2 - c1;
    const double d = norm(axis);
    const double scale = std::max({r1, r2, d});
    const double tol = 1e-12 * scale;
    if (d <= tol || d > r1 + r2 + tol || d < std::abs(r1 - r2) - tol) {
        throw NoIntersection("circles do not intersect (d=" + std::to_string(d) +
                             ", r1=" + std::to_string(r1) + ", r2=" + std::to_string(r2) + ")");
    }
    const double x = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    const double h2 = r1 * r1 - x * x;
    const double y = h2 > 0.0 ? std::sqrt(h2) : 0.0;

    const Point e = (1.0 / d) * axis;
    const Point n{-e.y, e.x};
    const Point base = c1 + x * e;
    const Point p_plus = base + y * n;
    const Point p_minus = base - y * n;
    const Point best =
        clip.signed_distance(p_plus) >= clip.signed_distance(p_minus) ? p_plus : p_minus;
    if (!clip.contains(best) && clip.signed_distance(best) < -tol) {
        throw NoIntersection("intersection points lie outside the clip half-space");
    }
    return {best, y <= tol * 1e-3 || h2 <= 0.0};
}

// =============================================================================
// Ring-intersection size bound
// =============================================================================

/// Radius Phi(delta) of the ball around the target that contains the common
/// area of the two secure rings whenever their radii are within delta of the
/// true distances. Requires 0 < delta < upsilon.
inline double phi_bound(double d_upper, double d_secure, double upsilon, double delta) {
    if (!(delta >= 0.0) || !(delta < upsilon)) {
        throw DomainError("phi_bound requires 0 <= delta < upsilon");
    }
    const double a = 2.0 * d_upper + upsilon;
    return std::sqrt(a) * std::sqrt(a / d_secure * (upsilon / d_secure + 1.0) + 2.0) *
           std::sqrt(delta);
}

inline double phi_bound(const DistanceBounds& bounds, double upsilon, double delta) {
    return phi_bound(bounds.d_upper, bounds.d_secure, upsilon, delta);
}

// =============================================================================
// Does a circle pass through the common area of two rings?
// =============================================================================

/// cos/sin of the M evenly spaced angles 2*pi*m/M, m = 0..M-1.
class UnitCircleTable {
public:
    explicit UnitCircleTable(std::size_t m) : cos_(m), sin_(m) {
        if (m < 3) throw DomainError("circle discretization needs at least 3 points");
        for (std::size_t i = 0; i < m; ++i) {
            const double angle = two_pi * static_cast<double>(i) / static_cast<double>(m);
            cos_[i] = std::cos(angle);
            sin_[i] = std::sin(angle);
        }
    }

    std::size_t size() const { return cos_.size(); }
    double cos(std::size_t i) const { return cos_[i]; }
    double sin(std::size_t i) const { return sin_[i]; }

private:
    std::vector<double> cos_;
    std::vector<double> sin_;
};

/// Brute-force test over M evenly spaced points of the circle, stopping at
/// the first point inside the clip and both rings. Ring membership is checked
/// on squared distances, which avoids a sqrt per point.
inline bool circle_meets_region_discretized(const ClippedCircle& circle, const Ring& r1,
                                            const Ring& r2, const UnitCircleTable& table) {
    const double lo1 = r1.inner() * r1.inner(), hi1 = r1.outer() * r1.outer();
    const double lo2 = r2.inner() * r2.inner(), hi2 = r2.outer() * r2.outer();
    for (std::size_t m = 0; m < table.size(); ++m) {
        const Point p{circle.center.x + circle.radius * table.cos(m),
                      circle.center.y + circle.radius * table.sin(m)};
        const double q1 = squared_norm(p - r1.center);
        if (q1 < lo1 || q1 > hi1) continue;
        const double q2 = squared_norm(p - r2.center);
        if (q2 < lo2 || q2 > hi2) continue;
        if (circle.clip.contains(p) && r1.clip.contains(p)) return true;
    }
    return false;
}

inline bool circle_meets_region_discretized(const ClippedCircle& circle, const Ring& r1,
                                            const Ring& r2, std::size_t m) {
    return circle_meets_region_discretized(circle, r1, r2, UnitCircleTable(m));
}

namespace detail {

/// Closed intervals on [0, 2*pi] describing a subset of circle angles.
class AngleSet {
public:
    struct Interval {
        double lo;
        double hi;
    };

    static AngleSet full() { return AngleSet({{0.0, two_pi}}); }
    static AngleSet empty() { return AngleSet({}); }

    /// Angles within `half_width` of `center` (wrapping), widened by `slack`.
    static AngleSet arc(double center, double half_width, double slack) {
        const double w = half_width + slack;
        if (w >= std::numbers::pi) return full();
        AngleSet set({});
        set.add_wrapped(center - w, center + w);
        return set;
    }

    /// Angles psi with |psi - center| in [w_lo, w_hi] (mod 2*pi), widened by slack.
    static AngleSet symmetric_band(double center, double w_lo, double w_hi, double slack) {
        const double lo = std::max(0.0, w_lo - slack);
        const double hi = w_hi + slack;
        if (lo <= 0.0) return arc(center, hi, 0.0);
        if (hi >= std::numbers::pi) {
            // complement of the open arc of half-width lo around center
            return arc(center + std::numbers::pi, std::numbers::pi - lo, 0.0);
        }
        AngleSet set({});
        set.add_wrapped(center + lo, center + hi);
        set.add_wrapped(center - hi, center - lo);
        return set;
    }

    bool is_empty() const { return intervals_.empty(); }
    std::span<const Interval> intervals() const { return intervals_; }

    AngleSet intersect(const AngleSet& other) const {
        std::vector<Interval> out;
        for (const Interval& a : intervals_) {
            for (const Interval& b : other.intervals_) {
                const double lo = std::max(a.lo, b.lo);
                const double hi = std::min(a.hi, b.hi);
                if (lo <= hi) out.push_back({lo, hi});
            }
        }
        return AngleSet(std::move(out));
    }

private:
    explicit AngleSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {}

    void add_wrapped(double lo, double hi) {
        double start = std::fmod(lo, two_pi);
        if (start < 0.0) start += two_pi;
        const double end = start + (hi - lo);
        if (end <= two_pi) {
            intervals_.push_back({start, end});
        } else {
            intervals_.push_back({start, two_pi});
            intervals_.push_back({0.0, end - two_pi});
        }
    }

    std::vector<Interval> intervals_;
};

// Slack applied to every angle interval endpoint, in radians.
inline constexpr double angle_tolerance = 1e-12;
// Rounding allowance on cosine bounds before they are declared infeasible.
inline constexpr double cosine_tolerance = 4.0 * std::numeric_limits<double>::epsilon();

inline AngleSet clip_angles(const ClippedCircle& circle) {
    const HalfSpace& clip = circle.clip;
    const double s = clip.signed_distance(circle.center);
    if (circle.radius <= 0.0) return s >= 0.0 ? AngleSet::full() : AngleSet::empty();
    const Point n = clip.inward_normal();
    // s + r cos(phi - phi_n) >= 0
    const double bound = -s / circle.radius;
    if (bound > 1.0 + cosine_tolerance) return AngleSet::empty();
    if (bound <= -1.0) return AngleSet::full();
    const double w = std::acos(std::clamp(bound, -1.0, 1.0));
    return AngleSet::arc(std::atan2(n.y, n.x), w, angle_tolerance);
}

inline AngleSet ring_angles(const ClippedCircle& circle, const Ring& ring) {
    const Point offset = ring.center - circle.center;
    const double d = norm(offset);
    const double r = circle.radius;
    const double inner = ring.inner();
    const double outer = ring.outer();
    if (d == 0.0 || r == 0.0) {
        // every point of the circle is at distance max(r, d) from the ring center
        const double dist = std::max(r, d);
        return inner <= dist && dist <= outer ? AngleSet::full() : AngleSet::empty();
    }
    // |p - q|^2 = r^2 + d^2 - 2 r d cos(phi - phi_q)
    const double denom = 2.0 * r * d;
    const double cos_lo = (r * r + d * d - outer * outer) / denom;  // cos >= cos_lo
    const double cos_hi = (r * r + d * d - inner * inner) / denom;  // cos <= cos_hi
    if (cos_lo > 1.0 + cosine_tolerance || cos_hi < -1.0 - cosine_tolerance) {
        return AngleSet::empty();
    }
    const double w_lo = std::acos(std::clamp(cos_hi, -1.0, 1.0));
    const double w_hi = std::acos(std::clamp(cos_lo, -1.0, 1.0));
    return AngleSet::symmetric_band(std::atan2(offset.y, offset.x), w_lo, w_hi, angle_tolerance);
}

}  // namespace detail

/// Exact counterpart of the discretized test: every constraint is turned into
/// closed angle intervals on the circle and the test succeeds when their
/// intersection is non-empty. Endpoints are widened by 1e-12 rad so exact
/// tangency counts as meeting the region.
inline bool circle_meets_region_analytic(const ClippedCircle& circle, const Ring& r1,
                                         const Ring& r2) {
    detail::AngleSet set = detail::clip_angles(circle);
    // the rings carry their own clip; the common area is clipped by r1's half-space
    if (!set.is_empty()) {
        ClippedCircle ring_clip = circle;
        ring_clip.clip = r1.clip;
        set = set.intersect(detail::clip_angles(ring_clip));
    }
    if (!set.is_empty()) set = set.intersect(detail::ring_angles(circle, r1));
    if (!set.is_empty()) set = set.intersect(detail::ring_angles(circle, r2));
    return !set.is_empty();
}

// =============================================================================
// Brute-force check of the ring-intersection bounds
// =============================================================================

struct OracleReport {
    bool assumptions_met = false;  ///< false: the bound is not guaranteed for these inputs
    double phi = 0.0;              ///< Phi(delta), or NaN when delta is out of range
    double max_distance = 0.0;     ///< largest |theta - target| seen inside the ring intersection
    std::size_t accepted = 0;      ///< sampled points found inside the intersection
    std::size_t proposals = 0;
    bool upper_holds = false;      ///< max_distance < phi
    bool lower_holds = false;      ///< every grid point of B(target, delta) is in both true-radius rings
    std::size_t lower_violations = 0;
};

/// Rejection-samples the common area of `r1` and `r2` and grid-samples the
/// delta-ball around the target. The upper containment is checked against
/// Phi(delta); the lower one against rings re-centered on the true distances.
inline OracleReport containment_oracle(const DistanceBounds& bounds, double upsilon,
                                       double delta, const Ring& r1, const Ring& r2,
                                       Point target, std::size_t samples,
                                       std::uint64_t seed = 0x5eed) {
    OracleReport report;
    const double true1 = distance(target, r1.center);
    const double true2 = distance(target, r2.center);
    report.assumptions_met =
        delta < upsilon && bounds.d_secure > bounds.d_upper - bounds.d_lower + 2.0 * upsilon &&
        true1 + true2 > bounds.d_secure + 2.0 * upsilon && r1.clip.contains(target) &&
        std::abs(r1.radius - true1) <= delta * (1.0 + 1e-12) &&
        std::abs(r2.radius - true2) <= delta * (1.0 + 1e-12);
    report.phi = delta < upsilon && delta >= 0.0 ? phi_bound(bounds, upsilon, delta)
                                                  : std::numeric_limits<double>::quiet_NaN();

    // Upper containment. Corner points of the region are exact extremes
    // candidates; the interior is covered by rejection sampling in polar
    // coordinates around r1's center.
    for (const double a : {r1.inner(), r1.outer()}) {
        for (const double b : {r2.inner(), r2.outer()}) {
            if (a <= 0.0 || b <= 0.0) continue;
            try {
                const Point corner =
                    circle_circle_intersection(r1.center, a, r2.center, b, r1.clip).point;
                if (ring_member(corner, r1, r2)) {
                    report.max_distance = std::max(report.max_distance, distance(corner, target));
                }
            } catch (const NoIntersection&) {
            }
        }
    }

    // Angular window: union over a radius scan of the feasible angle sets.
    const double r_in = r1.inner();
    const double r_out = r1.outer();
    double win_lo = std::numeric_limits<double>::infinity();
    double win_hi = -std::numeric_limits<double>::infinity();
    const Point axis = r2.center - r1.center;
    const double axis_angle = std::atan2(axis.y, axis.x);
    constexpr int scan = 512;
    for (int k = 0; k <= scan; ++k) {
        const double rad = r_in + (r_out - r_in) * k / scan;
        const ClippedCircle c{r1.center, rad, r1.clip};
        const auto set = detail::clip_angles(c).intersect(detail::ring_angles(c, r2));
        for (const auto& iv : set.intervals()) {
            // express relative to the axis angle, folded into (-pi, pi]
            for (const double ang : {iv.lo, iv.hi}) {
                double rel = std::remainder(ang - axis_angle, two_pi);
                win_lo = std::min(win_lo, rel);
                win_hi = std::max(win_hi, rel);
            }
        }
    }
    if (win_lo <= win_hi) {
        const double pad = 0.1 * (win_hi - win_lo) + 1e-9;
        win_lo = std::max(-std::numbers::pi, win_lo - pad);
        win_hi = std::min(std::numbers::pi, win_hi + pad);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const std::size_t max_proposals = samples * 2000 + 100000;
        while (report.accepted < samples && report.proposals < max_proposals) {
            ++report.proposals;
            // area-uniform radius on [r_in, r_out]
            const double u = unit(rng);
            const double rad = std::sqrt(r_in * r_in + u * (r_out * r_out - r_in * r_in));
            const double ang = axis_angle + win_lo + (win_hi - win_lo) * unit(rng);
            const Point p{r1.center.x + rad * std::cos(ang), r1.center.y + rad * std::sin(ang)};
            if (!ring_member(p, r1, r2)) continue;
            ++report.accepted;
            report.max_distance = std::max(report.max_distance, distance(p, target));
        }
    }
    report.upper_holds = !std::isnan(report.phi) && report.max_distance < report.phi;

    // Lower containment on a polar grid of the closed delta-ball (~1000 points).
    const Ring t1{r1.center, true1, delta, r1.clip};
    const Ring t2{r2.center, true2, delta, r1.clip};
    constexpr int radial = 20;
    constexpr int angular = 50;
    for (int i = 0; i <= radial; ++i) {
        const double rad = delta * i / radial;
        for (int k = 0; k < (i == 0 ? 1 : angular); ++k) {
            const double ang = two_pi * k / angular;
            const Point p{target.x + rad * std::cos(ang), target.y + rad * std::sin(ang)};
            if (!r1.clip.contains(p)) continue;  // the ball is clipped as well
            if (!t1.contains(p) || !t2.contains(p)) ++report.lower_violations;
        }
    }
    report.lower_holds = report.lower_violations == 0;
    return report;
}

}  // namespace geoguard
