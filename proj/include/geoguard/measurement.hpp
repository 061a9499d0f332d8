// Observations: raw signals, one-bit quantization, zero-bit probabilities,
// empirical frequencies and the naive distance estimator.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "geoguard/errors.hpp"
#include "geoguard/rng.hpp"
#include "geoguard/scenario.hpp"

namespace geoguard {

/// Per-sensor bit sequences of common length K.
struct QuantizedDataset {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::vector<int> ids;
    std::vector<std::vector<std::uint8_t>> bits;

    void add(int id, std::vector<std::uint8_t> sequence) {
        if (sequence.empty()) throw EmptyData("sensor " + std::to_string(id) + " has no samples");
        if (ids.empty() && k == 0) k = sequence.size();
        if (sequence.size() != k) {
            throw InvalidScenario("sensor " + std::to_string(id) + " has " +
                                  std::to_string(sequence.size()) + " samples, expected " +
                                  std::to_string(k));
        }
        if (std::find(ids.begin(), ids.end(), id) != ids.end()) {
            throw InvalidScenario("duplicate dataset entry for sensor " + std::to_string(id));
        }
        ids.push_back(id);
        bits.push_back(std::move(sequence));
    }

    bool has(int id) const { return std::find(ids.begin(), ids.end(), id) != ids.end(); }

    const std::vector<std::uint8_t>& bits_of(int id) const {
        const auto it = std::find(ids.begin(), ids.end(), id);
        if (it == ids.end()) throw MissingSensorData("dataset has no sensor " + std::to_string(id));
        return bits[static_cast<std::size_t>(it - ids.begin())];
    }
};

struct EmpiricalFreq {
    double xi = 0.0;
    std::size_t k_samples = 0;
};

inline double true_distance(const ScenarioConfig& s, std::size_t j) {
    return distance(s.sensors.at(j).position, s.target);
}

/// Zero-bit probability F(tau - P0 (D0/D)^gamma) of sensor j at distance D.
inline double prob_zero_at(const ScenarioConfig& s, std::size_t j, double dist) {
    const SensorSpec& sensor = s.sensors.at(j);
    return sensor.noise.cdf(sensor.threshold - mean_signal(s, dist));
}

inline double prob_zero(const ScenarioConfig& s, std::size_t j, Point target) {
    return prob_zero_at(s, j, distance(s.sensors.at(j).position, target));
}

inline double prob_zero(const ScenarioConfig& s, std::size_t j) {
    return prob_zero(s, j, s.target);
}

/// Raw samples s_k = P0 (D0/D_j)^gamma + n_k, with n_k drawn by inversion
/// from the noise stream of (seed, sensor id).
inline std::vector<double> sample_signal(const ScenarioConfig& s, std::size_t j, std::size_t k,
                                         std::uint64_t seed) {
    const SensorSpec& sensor = s.sensors.at(j);
    const double mean = mean_signal(s, true_distance(s, j));
    const std::uint64_t key =
        stream_key(seed, Stream::noise, static_cast<std::uint64_t>(sensor.id));
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = mean + sensor.noise.inv_cdf(uniform_at(key, i));
    return out;
}

/// u = 1 iff s > tau.
inline std::vector<std::uint8_t> quantize(const ScenarioConfig& s, std::size_t j,
                                          std::span<const double> samples) {
    const double tau = s.sensors.at(j).threshold;
    std::vector<std::uint8_t> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i] > tau ? 1 : 0;
    return out;
}

/// Quantized bits straight from the uniforms: s > tau exactly when the
/// uniform behind the noise draw exceeds p = F(tau - mean), so this path
/// skips the quantile evaluation and matches quantize(sample_signal(...)).
inline std::vector<std::uint8_t> sample_bits(const ScenarioConfig& s, std::size_t j,
                                             std::size_t k, std::uint64_t seed) {
    const double p = prob_zero(s, j);
    const std::uint64_t key =
        stream_key(seed, Stream::noise, static_cast<std::uint64_t>(s.sensors.at(j).id));
    std::vector<std::uint8_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = uniform_at(key, i) > p ? 1 : 0;
    return out;
}

inline EmpiricalFreq empirical_freq(std::span<const std::uint8_t> bits) {
    if (bits.empty()) throw EmptyData("empirical frequency of an empty sequence");
    const auto zeros = static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 0));
    return {static_cast<double>(zeros) / static_cast<double>(bits.size()), bits.size()};
}

struct DistanceEstimate {
    double distance = 0.0;
    bool clamped = false;
};

/// Inverse of the zero-probability map: the distance at which sensor j
/// would see zero-bit probability `tp`. Requires tp in (0, F(tau)).
inline double attacked_distance(const ScenarioConfig& s, std::size_t j, double tp) {
    const SensorSpec& sensor = s.sensors.at(j);
    if (!(tp > 0.0 && tp < sensor.noise.cdf(sensor.threshold))) {
        throw DomainError("probability " + std::to_string(tp) + " outside (0, F(tau))");
    }
    const double base = sensor.threshold - sensor.noise.inv_cdf(tp);
    if (!(base > 0.0)) throw DomainError("probability too close to F(tau)");
    return s.d0 * std::pow(s.p0, 1.0 / s.gamma) * std::pow(base, -1.0 / s.gamma);
}

/// Naive ML distance estimate. xi is clamped into
/// [margin, F(tau) - margin] first, margin = 1/(2K) by default.
inline DistanceEstimate nmle_distance(const ScenarioConfig& s, std::size_t j, EmpiricalFreq f,
                                      double margin = -1.0) {
    if (f.k_samples == 0) throw EmptyData("empirical frequency without samples");
    if (margin < 0.0) margin = 0.5 / static_cast<double>(f.k_samples);
    const SensorSpec& sensor = s.sensors.at(j);
    const double top = sensor.noise.cdf(sensor.threshold);
    double lo = margin;
    double hi = top - margin;
    if (lo > hi) lo = hi = 0.5 * top;
    DistanceEstimate out;
    double xi = f.xi;
    if (xi < lo || xi > hi) {
        xi = std::clamp(xi, lo, hi);
        out.clamped = true;
    }
    out.distance = attacked_distance(s, j, xi);
    return out;
}

// -----------------------------------------------------------------------------
// Binary interchange format (little endian):
//   "GGQD"  u32 version  u64 K  u32 n  u64 seed  n x i32 id
//   then per sensor ceil(K/8) bytes, bit k at byte k/8, position k%8.
// -----------------------------------------------------------------------------

namespace detail {

template <typename T>
void put_le(std::ostream& os, T value) {
    std::array<char, sizeof(T)> buf{};
    auto u = static_cast<std::make_unsigned_t<T>>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        buf[i] = static_cast<char>(u & 0xffu);
        u = static_cast<std::make_unsigned_t<T>>(u >> 8);
    }
    os.write(buf.data(), buf.size());
}

template <typename T>
T get_le(std::istream& is, const char* field) {
    std::array<unsigned char, sizeof(T)> buf{};
    if (!is.read(reinterpret_cast<char*>(buf.data()), buf.size())) {
        throw ParseError("truncated dataset", field);
    }
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = sizeof(T); i-- > 0;) u = static_cast<std::make_unsigned_t<T>>((u << 8) | buf[i]);
    return static_cast<T>(u);
}

}  // namespace detail

inline constexpr char dataset_magic[4] = {'G', 'G', 'Q', 'D'};
inline constexpr std::uint32_t dataset_version = 1;

inline void write_dataset(std::ostream& os, const QuantizedDataset& data) {
    os.write(dataset_magic, 4);
    detail::put_le<std::uint32_t>(os, dataset_version);
    detail::put_le<std::uint64_t>(os, data.k);
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(data.ids.size()));
    detail::put_le<std::uint64_t>(os, data.seed);
    for (int id : data.ids) detail::put_le<std::int32_t>(os, id);
    std::vector<char> packed((data.k + 7) / 8);
    for (const auto& seq : data.bits) {
        std::fill(packed.begin(), packed.end(), 0);
        for (std::size_t i = 0; i < data.k; ++i) {
            if (seq[i]) packed[i / 8] = static_cast<char>(packed[i / 8] | (1 << (i % 8)));
        }
        os.write(packed.data(), static_cast<std::streamsize>(packed.size()));
    }
}

inline QuantizedDataset read_dataset(std::istream& is) {
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, dataset_magic, 4) != 0) {
        throw ParseError("not a quantized dataset", "magic");
    }
    if (detail::get_le<std::uint32_t>(is, "version") != dataset_version) {
        throw ParseError("unsupported dataset version", "version");
    }
    QuantizedDataset data;
    const auto k = detail::get_le<std::uint64_t>(is, "K");
    const auto n = detail::get_le<std::uint32_t>(is, "n");
    data.seed = detail::get_le<std::uint64_t>(is, "seed");
    if (k == 0) throw ParseError("K must be positive", "K");
    data.k = static_cast<std::size_t>(k);
    std::vector<int> ids(n);
    for (auto& id : ids) id = detail::get_le<std::int32_t>(is, "ids");
    std::vector<unsigned char> packed((k + 7) / 8);
    for (std::uint32_t s = 0; s < n; ++s) {
        if (!is.read(reinterpret_cast<char*>(packed.data()),
                     static_cast<std::streamsize>(packed.size()))) {
            throw ParseError("truncated bit block", "sensor " + std::to_string(ids[s]));
        }
        std::vector<std::uint8_t> seq(k);
        for (std::size_t i = 0; i < k; ++i) seq[i] = (packed[i / 8] >> (i % 8)) & 1u;
        data.add(ids[s], std::move(seq));
    }
    return data;
}

}  // namespace geoguard
