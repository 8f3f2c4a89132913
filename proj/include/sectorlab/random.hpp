#pragma once

// Seed derivation and uniform draws shared by every stochastic routine.
//
// Streams are std::mt19937_64 engines seeded from a 64-bit key. Keys are
// derived with the SplitMix64 finalizer, so a trial's stream depends only on
// (master_seed, trial_index) and never on scheduling.

#include <cstdint>
#include <random>

namespace sectorlab {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Key of stream `index` under `seed`: mix64(seed ^ mix64(index)).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return mix64(seed ^ mix64(index));
}

/// Domain tags keep independent consumers of one master seed apart.
enum class StreamTag : std::uint64_t {
    trial = 0x7472ULL,
    edge_fault = 0x6566ULL,
    expected_w = 0x6577ULL,
    tv_bound = 0x7476ULL,
    bootstrap = 0x6273ULL,
    selftest = 0x7374ULL,
};

constexpr std::uint64_t tagged_seed(std::uint64_t seed, StreamTag tag) noexcept {
    return derive_seed(seed, static_cast<std::uint64_t>(tag));
}

/// Sequential SplitMix64: output k is mix64(key + k * golden gamma). Used for
/// the inner area integrals, where mt19937_64 draws dominate the cost.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t key) noexcept : state_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    constexpr result_type operator()() noexcept {
        const std::uint64_t x = state_;
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(x);
    }

  private:
    std::uint64_t state_;
};

/// Uniform double on [0,1) from the top 53 bits of one engine output.
template <class Gen>
inline double uniform01(Gen& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Counter-based uniform on [0,1): a pure function of (key, a, b).
constexpr double counter_uniform(std::uint64_t key, std::uint64_t a, std::uint64_t b) noexcept {
    const std::uint64_t h = mix64(mix64(key ^ mix64(a)) ^ b);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline Engine make_engine(std::uint64_t key) {
    return Engine{key};
}

}  // namespace sectorlab
