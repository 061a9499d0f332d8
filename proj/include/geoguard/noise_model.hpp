// Additive sensor noise distributions: density, CDF, quantile and the
// interval extrema of the density used by the error-exponent constants.
#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "geoguard/errors.hpp"

namespace geoguard {

enum class NoiseKind {
    gaussian,
    logistic,
};

inline std::string_view to_string(NoiseKind kind) {
    switch (kind) {
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::logistic: return "logistic";
    }
    return "unknown";
}

inline NoiseKind noise_kind_from_string(std::string_view name) {
    if (name == "gaussian") return NoiseKind::gaussian;
    if (name == "logistic") return NoiseKind::logistic;
    throw DomainError("unknown noise kind '" + std::string(name) + "'");
}

namespace detail {

inline double standard_normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// erfc keeps full relative precision in the lower tail; the upper tail is
// computed by reflection so cdf(x) + cdf(-x) == 1 up to rounding.
inline double standard_normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// Acklam's rational approximation (relative error < 1.2e-9) followed by one
// Halley step against erfc, which brings the result to within a few ulp.
inline double standard_normal_quantile(double q) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double q_low = 0.02425;

    double x;
    if (q < q_low) {
        const double t = std::sqrt(-2.0 * std::log(q));
        x = (((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
            ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
    } else if (q <= 1.0 - q_low) {
        const double u = q - 0.5;
        const double r = u * u;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double t = std::sqrt(-2.0 * std::log1p(-q));
        x = -(((((c[0] * t + c[1]) * t + c[2]) * t + c[3]) * t + c[4]) * t + c[5]) /
            ((((d[0] * t + d[1]) * t + d[2]) * t + d[3]) * t + 1.0);
    }

    // Residual cdf(x) - q, evaluated in whichever tail keeps full precision.
    // For q >= 0.5 the subtraction 1 - q is exact.
    const double residual =
        x <= 0.0 ? standard_normal_cdf(x) - q : (1.0 - q) - standard_normal_cdf(-x);
    const double u = residual * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

inline double standard_logistic_pdf(double z) {
    const double e = std::exp(-std::abs(z));
    return e / ((1.0 + e) * (1.0 + e));
}

inline double standard_logistic_cdf(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

inline double standard_logistic_quantile(double q) { return std::log(q) - std::log1p(-q); }

}  // namespace detail

/// Location-scale family describing the additive noise f_j of one sensor.
///
/// Every shipped family is continuous, strictly positive on the real line and
/// unimodal with its mode at `location`. Extremum queries rely on that.
struct NoiseModel {
    NoiseKind kind = NoiseKind::gaussian;
    double location = 0.0;
    double scale = 1.0;

    static NoiseModel standard_gaussian() { return {}; }
    static NoiseModel gaussian(double location, double scale) {
        return {NoiseKind::gaussian, location, scale};
    }
    static NoiseModel logistic(double location, double scale) {
        return {NoiseKind::logistic, location, scale};
    }

    double mode() const { return location; }

    double density(double x) const {
        const double z = (x - location) / scale;
        switch (kind) {
        case NoiseKind::gaussian: return detail::standard_normal_pdf(z) / scale;
        case NoiseKind::logistic: return detail::standard_logistic_pdf(z) / scale;
        }
        return 0.0;
    }

    double cdf(double x) const {
        const double z = (x - location) / scale;
        switch (kind) {
        case NoiseKind::gaussian: return detail::standard_normal_cdf(z);
        case NoiseKind::logistic: return detail::standard_logistic_cdf(z);
        }
        return 0.0;
    }

    /// Quantile function; `q` must lie in the open interval (0, 1).
    double inv_cdf(double q) const {
        if (!(q > 0.0 && q < 1.0)) {
            throw DomainError("inv_cdf: probability " + std::to_string(q) +
                              " outside (0, 1)");
        }
        switch (kind) {
        case NoiseKind::gaussian: return location + scale * detail::standard_normal_quantile(q);
        case NoiseKind::logistic: return location + scale * detail::standard_logistic_quantile(q);
        }
        return 0.0;
    }

    /// Every shipped family has support equal to the whole real line, so the
    /// "well designed quantizer" support condition holds for any threshold.
    bool in_support(double x) const { return std::isfinite(x); }
};

inline void validate(const NoiseModel& model) {
    if (!(model.scale > 0.0) || !std::isfinite(model.scale) || !std::isfinite(model.location)) {
        throw DomainError("noise model requires finite location and positive finite scale");
    }
}

inline double cdf(const NoiseModel& model, double x) { return model.cdf(x); }
inline double inv_cdf(const NoiseModel& model, double q) { return model.inv_cdf(q); }

enum class Extremum { sup, inf };

/// Supremum or infimum of the density over [lo, hi]. Exact for unimodal
/// densities: the infimum sits at an endpoint, the supremum at the mode when
/// the mode is inside the interval and at the nearer endpoint otherwise.
inline double density_extremum(const NoiseModel& model, double lo, double hi, Extremum mode) {
    if (!(lo <= hi)) throw DomainError("density_extremum: lo must not exceed hi");
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw DomainError("density_extremum: interval leaves the positive-density region");
    }
    const double f_lo = model.density(lo);
    const double f_hi = model.density(hi);
    if (mode == Extremum::inf) return std::min(f_lo, f_hi);
    if (model.mode() >= lo && model.mode() <= hi) return model.density(model.mode());
    return std::max(f_lo, f_hi);
}

}  // namespace geoguard
