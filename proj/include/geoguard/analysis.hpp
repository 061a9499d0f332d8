// Error exponents of the detector. Every rate is a Bernoulli KL divergence;
// the per-sensor rates combine into false-alarm and miss exponents, and the
// bounds are C_e exp(-eta K) with C_e = 12 (three sensors, four terms each).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include "geoguard/attacks.hpp"
#include "geoguard/detector.hpp"
#include "geoguard/errors.hpp"
#include "geoguard/measurement.hpp"
#include "geoguard/scenario.hpp"

namespace geoguard {

inline constexpr double infinite_rate = std::numeric_limits<double>::infinity();
inline constexpr double bound_prefactor = 12.0;

struct ExponentParams {
    double sigma_l = 0.5;
    double sigma_u = 0.5;
};

struct EpsilonBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// eps_L = sigma_L rho_L and eps_U = sigma_U rho_U + (1 - sigma_U) F(tau),
/// so that 0 < eps_L < rho_L < rho_U < eps_U < F(tau).
inline EpsilonBounds epsilon_bounds(const ScenarioConfig& s, std::size_t j,
                                    const ExponentParams& params, const DistanceBounds& bounds) {
    if (!(params.sigma_l > 0.0 && params.sigma_l < 1.0 && params.sigma_u > 0.0 &&
          params.sigma_u < 1.0)) {
        throw DomainError("sigma_L and sigma_U must lie in (0, 1)");
    }
    const SensorSpec& sensor = s.sensors.at(j);
    const RhoBounds rho = rho_bounds(s, j, bounds);
    const double top = sensor.noise.cdf(sensor.threshold);
    return {params.sigma_l * rho.lower,
            params.sigma_u * rho.upper + (1.0 - params.sigma_u) * top};
}

inline EpsilonBounds epsilon_bounds(const ScenarioConfig& s, std::size_t j,
                                    const ExponentParams& params = {}) {
    return epsilon_bounds(s, j, params, compute_distance_bounds(s));
}

/// Xi_j = D0 P0^(1/gamma) [tau - F^{-1}(eps_U)]^(-(gamma+1)/gamma) / inf f
/// over [F^{-1}(eps_L), F^{-1}(eps_U)].
inline double xi_factor(const ScenarioConfig& s, std::size_t j, const EpsilonBounds& eps) {
    const SensorSpec& sensor = s.sensors.at(j);
    const double top = sensor.noise.cdf(sensor.threshold);
    if (!(eps.lower > 0.0 && eps.lower < eps.upper && eps.upper < top)) {
        throw DomainError("xi_factor needs 0 < eps_L < eps_U < F(tau)");
    }
    const double x_lo = sensor.noise.inv_cdf(eps.lower);
    const double x_hi = sensor.noise.inv_cdf(eps.upper);
    const double base = sensor.threshold - x_hi;
    if (!(base > 0.0)) throw DomainError("eps_U too close to F(tau)");
    const double floor = density_extremum(sensor.noise, x_lo, x_hi, Extremum::inf);
    return s.d0 * std::pow(s.p0, 1.0 / s.gamma) * std::pow(base, -(s.gamma + 1.0) / s.gamma) /
           floor;
}

inline double xi_factor(const ScenarioConfig& s, std::size_t j, const ExponentParams& params = {}) {
    return xi_factor(s, j, epsilon_bounds(s, j, params));
}

// -----------------------------------------------------------------------------
// Rate functions
// -----------------------------------------------------------------------------

namespace detail {

inline void check_rate_args(double p, double t) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("rate: p must lie in (0, 1)");
    if (!(t >= 0.0) || std::isnan(t)) throw DomainError("rate: t must be non-negative");
}

}  // namespace detail

/// Upward deviation rate; +inf once p + t exceeds 1.
inline double rate_eta1(double p, double t) {
    detail::check_rate_args(p, t);
    if (t > 1.0 - p) return infinite_rate;
    const double q = t + p;
    if (q >= 1.0) return -std::log(p);
    const double v = q * std::log((q * (1.0 - p)) / (p * (1.0 - q))) - std::log((1.0 - p) / (1.0 - q));
    return std::max(0.0, v);
}

/// Downward deviation rate; +inf once t exceeds p.
inline double rate_eta2(double p, double t) {
    detail::check_rate_args(p, t);
    if (t > p) return infinite_rate;
    const double q = p - t;
    if (q <= 0.0) return -std::log1p(-p);
    const double v = std::log((1.0 + t - p) / (1.0 - p)) -
                     q * std::log((p * (1.0 + t - p)) / (q * (1.0 - p)));
    return std::max(0.0, v);
}

struct EpsRates {
    double lower = 0.0;  ///< rate of falling to eps_L
    double upper = 0.0;  ///< rate of rising to eps_U
};

inline EpsRates rate_eps(double p, double eps_l, double eps_u) {
    if (!(0.0 < eps_l && eps_l < p && p < eps_u && eps_u < 1.0)) {
        throw DomainError("rate_eps needs 0 < eps_L < p < eps_U < 1");
    }
    EpsRates r;
    r.upper = std::max(0.0, eps_u * std::log(eps_u * (1.0 - p) / (p * (1.0 - eps_u))) -
                                std::log((1.0 - p) / (1.0 - eps_u)));
    r.lower = std::max(0.0, std::log((1.0 - eps_l) / (1.0 - p)) -
                                eps_l * std::log(p * (1.0 - eps_l) / (eps_l * (1.0 - p))));
    return r;
}

/// exp(-eta K), with exp(-inf * 0) taken as 1 and exp(-inf * K) as 0.
inline double decay(double eta, double k) {
    if (std::isinf(eta)) return k == 0.0 ? 1.0 : 0.0;
    return std::exp(-eta * k);
}

// -----------------------------------------------------------------------------
// Composite exponents
// -----------------------------------------------------------------------------

/// The four rates of one sensor at zero-bit probability p.
struct FourRates {
    double eta1 = 0.0;
    double eta2 = 0.0;
    double eps_l = 0.0;
    double eps_u = 0.0;

    double min() const { return std::min({eta1, eta2, eps_l, eps_u}); }
    double sum_decay(double k) const {
        return decay(eta1, k) + decay(eta2, k) + decay(eps_l, k) + decay(eps_u, k);
    }
};

struct SensorRates {
    int id = 0;
    bool secure = false;
    bool attacked = false;
    double p = 0.0;
    double p_tilde = 0.0;
    EpsilonBounds eps;
    double xi = 0.0;  ///< Xi_j
    double t = 0.0;   ///< delta / (2 Xi_j)
    FourRates clean;
    FourRates tilde;  ///< same rates at p_tilde (equal to `clean` when unattacked)
};

struct CompositeRates {
    int id = 0;
    bool attacked = false;
    double eta0 = 0.0;  ///< false-alarm exponent
    double eta1 = 0.0;  ///< miss exponent
};

struct RateReport {
    double delta = 0.0;
    std::vector<SensorRates> sensors;      ///< every sensor, indexed like the scenario
    std::vector<CompositeRates> composite; ///< unsecure sensors, ascending id
    std::size_t secure1 = 0;
    std::size_t secure2 = 0;
    double eta_e = 0.0;
    double c_e = bound_prefactor;

    const CompositeRates& of(int id) const {
        for (const auto& c : composite) {
            if (c.id == id) return c;
        }
        throw MissingSensorData("no rates for sensor " + std::to_string(id));
    }

    double fa_bound(int id, double k) const { return c_e * decay(of(id).eta0, k); }
    double miss_bound(int id, double k) const { return c_e * decay(of(id).eta1, k); }
    double pe_bound(double k) const { return c_e * decay(eta_e, k); }

    /// The twelve-term sums the bounds dominate.
    double fa_raw(std::size_t j, double k) const {
        return sensors.at(j).clean.sum_decay(k) + secure_raw(k);
    }
    double miss_raw(std::size_t j, double k) const {
        return sensors.at(j).tilde.sum_decay(k) + secure_raw(k);
    }

private:
    double secure_raw(double k) const {
        return sensors[secure1].clean.sum_decay(k) + sensors[secure2].clean.sum_decay(k);
    }
};

inline FourRates four_rates(double p, double t, const EpsilonBounds& eps) {
    const EpsRates e = rate_eps(p, eps.lower, eps.upper);
    return {rate_eta1(p, t), rate_eta2(p, t), e.lower, e.upper};
}

/// All exponents at the configured delta. Throws DomainError when an attacked
/// probability leaves (eps_L, eps_U), i.e. for attacks that are not subtle.
inline RateReport composite_exponents(const ScenarioConfig& s, const AttackAssignment& attacks,
                                      const DetectorConfig& cfg,
                                      const ExponentParams& params = {}) {
    validate(cfg);
    const DistanceBounds bounds = compute_distance_bounds(s);
    RateReport report;
    report.delta = cfg.delta;
    std::tie(report.secure1, report.secure2) = s.secure_indices();
    for (std::size_t j = 0; j < s.sensors.size(); ++j) {
        const SensorSpec& sensor = s.sensors[j];
        const AttackSpec& spec = attacks.spec_for(sensor.id);
        SensorRates r;
        r.id = sensor.id;
        r.secure = sensor.secure;
        r.attacked = is_attacked(spec);
        r.p = prob_zero(s, j);
        r.p_tilde = post_attack_prob(s, j, spec);
        r.eps = epsilon_bounds(s, j, params, bounds);
        r.xi = xi_factor(s, j, r.eps);
        r.t = cfg.delta / (2.0 * r.xi);
        r.clean = four_rates(r.p, r.t, r.eps);
        r.tilde = r.attacked ? four_rates(r.p_tilde, r.t, r.eps) : r.clean;
        report.sensors.push_back(r);
    }
    const double secure_min = std::min(report.sensors[report.secure1].clean.min(),
                                       report.sensors[report.secure2].clean.min());
    report.eta_e = infinite_rate;
    for (const SensorRates& r : report.sensors) {
        if (r.secure) continue;
        const CompositeRates c{r.id, r.attacked, std::min(r.clean.min(), secure_min),
                               std::min(r.tilde.min(), secure_min)};
        report.eta_e = std::min({report.eta_e, c.eta0, c.eta1});
        report.composite.push_back(c);
    }
    std::sort(report.composite.begin(), report.composite.end(),
              [](const CompositeRates& a, const CompositeRates& b) { return a.id < b.id; });
    return report;
}

}  // namespace geoguard
