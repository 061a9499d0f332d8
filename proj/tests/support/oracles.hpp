// Reference implementations used only by the tests. None of them shares code
// with the library routines they check.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include <boost/math/distributions/logistic.hpp>
#include <boost/math/distributions/normal.hpp>

#include <geoguard/point.hpp>

namespace oracle {

/// Bernoulli KL divergence D(q || p) in long double, with 0 log 0 = 0.
inline double kl_bernoulli(double q_in, double p_in) {
    const long double q = q_in;
    const long double p = p_in;
    long double v = 0.0L;
    if (q > 0.0L) v += q * std::log(q / p);
    if (q < 1.0L) v += (1.0L - q) * std::log((1.0L - q) / (1.0L - p));
    return static_cast<double>(v);
}

/// log of C(n, i) p^i (1-p)^(n-i).
inline long double log_binom_term(std::int64_t n, std::int64_t i, long double p) {
    return std::lgamma(static_cast<long double>(n) + 1.0L) -
           std::lgamma(static_cast<long double>(i) + 1.0L) -
           std::lgamma(static_cast<long double>(n - i) + 1.0L) +
           static_cast<long double>(i) * std::log(p) +
           static_cast<long double>(n - i) * std::log1p(-p);
}

/// Pr(X >= m) for X ~ Binomial(n, p), summed term by term.
inline double binomial_upper_tail(std::int64_t n, double p, std::int64_t m) {
    if (m <= 0) return 1.0;
    if (m > n) return 0.0;
    long double peak = -std::numeric_limits<long double>::infinity();
    for (std::int64_t i = m; i <= n; ++i) peak = std::max(peak, log_binom_term(n, i, p));
    long double sum = 0.0L;
    for (std::int64_t i = m; i <= n; ++i) sum += std::exp(log_binom_term(n, i, p) - peak);
    return static_cast<double>(std::exp(peak) * sum);
}

/// Pr(X <= m) for X ~ Binomial(n, p).
inline double binomial_lower_tail(std::int64_t n, double p, std::int64_t m) {
    return binomial_upper_tail(n, 1.0 - p, n - m);
}

inline double normal_cdf(double x) { return boost::math::cdf(boost::math::normal(), x); }
inline double normal_quantile(double q) { return boost::math::quantile(boost::math::normal(), q); }
inline double normal_pdf(double x) { return boost::math::pdf(boost::math::normal(), x); }

/// Intersection of circle (c1, r1) with circle (c2, r2) by bisection on the
/// angle along circle 1, measured from the direction of c2. The distance to
/// c2 grows monotonically with that angle on [0, pi]. `sign` selects the
/// counter-clockwise (+1) or clockwise (-1) solution.
inline geoguard::Point bisect_intersection(geoguard::Point c1, double r1, geoguard::Point c2,
                                           double r2, int sign) {
    const long double ax = static_cast<long double>(c2.x) - c1.x;
    const long double ay = static_cast<long double>(c2.y) - c1.y;
    const long double base = std::atan2(ay, ax);
    const auto dist_to_c2 = [&](long double phi) {
        const long double ang = base + sign * phi;
        const long double px = c1.x + r1 * std::cos(ang);
        const long double py = c1.y + r1 * std::sin(ang);
        return std::hypot(px - c2.x, py - c2.y);
    };
    long double lo = 0.0L;
    long double hi = 3.14159265358979323846264338327950288L;
    for (int it = 0; it < 200; ++it) {
        const long double mid = 0.5L * (lo + hi);
        (dist_to_c2(mid) < r2 ? lo : hi) = mid;
    }
    const long double ang = base + sign * 0.5L * (lo + hi);
    return {static_cast<double>(c1.x + r1 * std::cos(ang)),
            static_cast<double>(c1.y + r1 * std::sin(ang))};
}

}  // namespace oracle
