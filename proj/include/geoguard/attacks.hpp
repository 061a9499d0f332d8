// Data-falsification adversaries. Each variant is characterized by the
// post-attack zero-bit probability p~ = p + Psi it induces.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "geoguard/errors.hpp"
#include "geoguard/measurement.hpp"
#include "geoguard/rng.hpp"
#include "geoguard/scenario.hpp"

namespace geoguard {

struct NoAttack {};

/// Man-in-the-middle bit-flip channel: 0 -> 1 with psi0, 1 -> 0 with psi1.
struct Mima {
    double psi0 = 0.0;
    double psi1 = 0.0;
};

/// Direct offset of the zero-bit probability (e.g. a replaced quantizer).
struct PsiOffset {
    double psi = 0.0;
};

/// Additive bias on the raw samples before quantization.
struct SpoofBias {
    double bias = 0.0;
};

using AttackSpec = std::variant<NoAttack, Mima, PsiOffset, SpoofBias>;

inline bool is_attacked(const AttackSpec& spec) { return !std::holds_alternative<NoAttack>(spec); }

inline std::string describe(const AttackSpec& spec) {
    return std::visit(
        [](const auto& a) -> std::string {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, NoAttack>) return "none";
            else if constexpr (std::is_same_v<T, Mima>)
                return "mima(psi0=" + std::to_string(a.psi0) + ",psi1=" + std::to_string(a.psi1) + ")";
            else if constexpr (std::is_same_v<T, PsiOffset>) return "psi(" + std::to_string(a.psi) + ")";
            else return "spoof(b=" + std::to_string(a.bias) + ")";
        },
        spec);
}

inline void validate(const AttackSpec& spec) {
    if (const auto* m = std::get_if<Mima>(&spec)) {
        if (!(m->psi0 >= 0.0 && m->psi0 <= 1.0 && m->psi1 >= 0.0 && m->psi1 <= 1.0)) {
            throw DomainError("flip probabilities must lie in [0, 1]");
        }
    } else if (const auto* o = std::get_if<PsiOffset>(&spec)) {
        if (!std::isfinite(o->psi)) throw DomainError("psi offset must be finite");
    } else if (const auto* b = std::get_if<SpoofBias>(&spec)) {
        if (!std::isfinite(b->bias)) throw DomainError("spoofing bias must be finite");
    }
}

/// Attack per sensor id; sensors without an entry are unattacked.
struct AttackAssignment {
    std::map<int, AttackSpec> by_id;

    const AttackSpec& spec_for(int id) const {
        static const AttackSpec none = NoAttack{};
        const auto it = by_id.find(id);
        return it == by_id.end() ? none : it->second;
    }

    void set(int id, AttackSpec spec) { by_id[id] = spec; }

    bool attacked(int id) const { return is_attacked(spec_for(id)); }

    /// Secure sensors must stay clean and every entry must name a sensor.
    void validate_against(const ScenarioConfig& s) const {
        for (const auto& [id, spec] : by_id) {
            const std::size_t j = s.index_of(id);
            validate(spec);
            if (s.sensors[j].secure && is_attacked(spec)) {
                throw InvalidScenario("secure sensor " + std::to_string(id) + " cannot be attacked");
            }
        }
    }
};

/// Bit-domain attacks: independent flips driven by the attack stream of
/// (seed, sensor_id), separate from the measurement noise.
inline std::vector<std::uint8_t> apply_attack(const AttackSpec& spec,
                                              std::span<const std::uint8_t> bits,
                                              std::uint64_t seed, int sensor_id = 0) {
    if (std::holds_alternative<NoAttack>(spec)) return {bits.begin(), bits.end()};
    const auto* m = std::get_if<Mima>(&spec);
    if (m == nullptr) throw VariantMismatch(describe(spec) + " is not a bit-flip attack");
    validate(spec);
    const std::uint64_t key =
        stream_key(seed, Stream::attack, static_cast<std::uint64_t>(sensor_id));
    std::vector<std::uint8_t> out(bits.size());
    for (std::size_t k = 0; k < bits.size(); ++k) {
        const double v = uniform_at(key, k);
        out[k] = bits[k] ? (v < m->psi1 ? 0 : 1) : (v < m->psi0 ? 1 : 0);
    }
    return out;
}

inline std::vector<double> apply_spoof(const AttackSpec& spec, std::span<const double> samples) {
    const auto* b = std::get_if<SpoofBias>(&spec);
    if (b == nullptr) throw VariantMismatch(describe(spec) + " is not a spoofing attack");
    std::vector<double> out(samples.begin(), samples.end());
    for (double& v : out) v += b->bias;
    return out;
}

/// Post-attack zero-bit probability for the variants that need no noise
/// model. Spoofing requires the overload below.
inline double post_attack_prob(const AttackSpec& spec, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
    if (const auto* m = std::get_if<Mima>(&spec)) {
        // a zero survives with 1 - psi0, a one turns into a zero with psi1
        validate(spec);
        return (1.0 - m->psi0 - m->psi1) * p + m->psi1;
    }
    if (const auto* o = std::get_if<PsiOffset>(&spec)) {
        const double tp = p + o->psi;
        if (!(tp >= 0.0 && tp <= 1.0)) throw DomainError("psi offset pushes p outside [0, 1]");
        return tp;
    }
    if (std::holds_alternative<SpoofBias>(spec)) {
        throw VariantMismatch("spoofing needs the sensor noise model");
    }
    return p;
}

/// A bias b moves p = F(tau - m) to F(tau - b - m) = F(F^{-1}(p) - b).
inline double post_attack_prob(const AttackSpec& spec, double p, const NoiseModel& noise) {
    if (const auto* b = std::get_if<SpoofBias>(&spec)) {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p must lie in [0, 1]");
        if (p == 0.0 || p == 1.0) return p;
        return noise.cdf(noise.inv_cdf(p) - b->bias);
    }
    return post_attack_prob(spec, p);
}

inline double psi_of(const AttackSpec& spec, double p) { return post_attack_prob(spec, p) - p; }

inline double psi_of(const AttackSpec& spec, double p, const NoiseModel& noise) {
    return post_attack_prob(spec, p, noise) - p;
}

/// Post-attack zero-bit probability of sensor j at the true target.
inline double post_attack_prob(const ScenarioConfig& s, std::size_t j, const AttackSpec& spec) {
    return post_attack_prob(spec, prob_zero(s, j), s.sensors.at(j).noise);
}

/// The attacked probability stays inside the bracket an honest sensor could
/// produce anywhere in the ROI.
inline bool check_subtle(const ScenarioConfig& s, std::size_t j, const AttackSpec& spec) {
    const RhoBounds rho = rho_bounds(s, j);
    const double tp = post_attack_prob(s, j, spec);
    return rho.lower <= tp && tp <= rho.upper;
}

inline bool check_significant(const AttackSpec& spec, double p, double kappa) {
    if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
    return std::abs(psi_of(spec, p)) > kappa;
}

inline bool check_significant(const ScenarioConfig& s, std::size_t j, const AttackSpec& spec,
                              double kappa) {
    if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
    const double p = prob_zero(s, j);
    return std::abs(post_attack_prob(s, j, spec) - p) > kappa;
}

// -----------------------------------------------------------------------------
// Attacked data generation
// -----------------------------------------------------------------------------

namespace detail {

// Zero-bit decision for sample k of sensor j. `p` is the clean zero-bit
// probability and `tp` the post-attack one; bit-flip attacks additionally
// draw from the attack stream.
struct BitRule {
    enum class Kind { clean, flip, threshold } kind = Kind::clean;
    double p = 0.0;
    double tp = 0.0;
    double psi0 = 0.0;
    double psi1 = 0.0;
    std::uint64_t noise_key = 0;
    std::uint64_t attack_key = 0;

    bool zero(std::uint64_t k) const {
        const double u = uniform_at(noise_key, k);
        switch (kind) {
        case Kind::clean: return u <= p;
        case Kind::threshold: return u <= tp;
        case Kind::flip: {
            const double v = uniform_at(attack_key, k);
            return u <= p ? !(v < psi0) : v < psi1;
        }
        }
        return false;
    }
};

inline BitRule bit_rule(const ScenarioConfig& s, std::size_t j, const AttackSpec& spec,
                        std::uint64_t seed) {
    BitRule r;
    const auto id = static_cast<std::uint64_t>(s.sensors.at(j).id);
    r.p = prob_zero(s, j);
    r.tp = r.p;
    r.noise_key = stream_key(seed, Stream::noise, id);
    r.attack_key = stream_key(seed, Stream::attack, id);
    if (const auto* m = std::get_if<Mima>(&spec)) {
        validate(spec);
        r.kind = BitRule::Kind::flip;
        r.psi0 = m->psi0;
        r.psi1 = m->psi1;
    } else if (is_attacked(spec)) {
        // A spoofed sample m + b + F^{-1}(u) exceeds tau iff u > F(tau - b - m);
        // a replaced quantizer is modeled the same way with threshold p + Psi.
        r.kind = BitRule::Kind::threshold;
        r.tp = post_attack_prob(s, j, spec);
    }
    return r;
}

}  // namespace detail

/// Full dataset for every sensor, attacks applied.
inline QuantizedDataset generate_dataset(const ScenarioConfig& s, const AttackAssignment& attacks,
                                         std::size_t k, std::uint64_t seed) {
    if (k == 0) throw EmptyData("K must be positive");
    QuantizedDataset data;
    data.seed = seed;
    for (std::size_t j = 0; j < s.sensors.size(); ++j) {
        const detail::BitRule rule = detail::bit_rule(s, j, attacks.spec_for(s.sensors[j].id), seed);
        std::vector<std::uint8_t> bits(k);
        for (std::size_t i = 0; i < k; ++i) bits[i] = rule.zero(i) ? 0 : 1;
        data.add(s.sensors[j].id, std::move(bits));
    }
    return data;
}

/// Number of zero bits per sensor (indexed like s.sensors). Same draws as
/// generate_dataset without materializing the sequences.
inline std::vector<std::uint64_t> zero_counts(const ScenarioConfig& s,
                                              const AttackAssignment& attacks, std::size_t k,
                                              std::uint64_t seed) {
    std::vector<std::uint64_t> out(s.sensors.size());
    for (std::size_t j = 0; j < s.sensors.size(); ++j) {
        const detail::BitRule rule = detail::bit_rule(s, j, attacks.spec_for(s.sensors[j].id), seed);
        std::uint64_t zeros = 0;
        if (rule.kind == detail::BitRule::Kind::flip) {
            for (std::uint64_t i = 0; i < k; ++i) zeros += rule.zero(i) ? 1 : 0;
        } else {
            const double thr = rule.kind == detail::BitRule::Kind::clean ? rule.p : rule.tp;
            for (std::uint64_t i = 0; i < k; ++i) zeros += uniform_at(rule.noise_key, i) <= thr;
        }
        out[j] = zeros;
    }
    return out;
}

}  // namespace geoguard
