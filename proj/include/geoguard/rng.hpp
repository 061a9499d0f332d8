// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, sensor, index), so datasets are identical no matter how the
// work is split across threads.
#pragma once

#include <cstdint>

namespace geoguard {

enum class Stream : std::uint64_t {
    noise = 0x6e6f697365ULL,
    attack = 0x61747461636bULL,
    trial = 0x747269616cULL,
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Key of one (stream, sensor) sequence under `seed`.
constexpr std::uint64_t stream_key(std::uint64_t seed, Stream stream, std::uint64_t sensor) {
    return mix64(mix64(seed ^ mix64(static_cast<std::uint64_t>(stream))) + sensor);
}

/// k-th uniform of a keyed sequence, strictly inside (0, 1).
constexpr double uniform_at(std::uint64_t key, std::uint64_t k) {
    const std::uint64_t x = mix64(key + k * 0x9e3779b97f4a7c15ULL);
    return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

/// Seed of one Monte Carlo cell.
constexpr std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial, std::uint64_t k) {
    return mix64(stream_key(base_seed, Stream::trial, trial) ^ mix64(k));
}

}  // namespace geoguard
