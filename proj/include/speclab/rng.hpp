#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace speclab {

/// One SplitMix64 step: a bijective 64-bit mixer used for seed derivation.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// 64-bit FNV-1a hash, used to give every experimental cell a stable identity.
constexpr std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 0xCBF29CE484222325ULL) {
    for (char c : text) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Purposes of the independent substreams inside one repetition.
enum class Substream : std::uint64_t {
    root = 0,
    anchors = 1,
    train_points = 2,
    noise = 3,
    test_points = 4,
    auxiliary = 5,
};

/// Splittable seeding scheme: seed = mix(master, cell, rep, substream).
///
/// Each argument passes through a full SplitMix64 round before being folded in,
/// so distinct (cell, rep, substream) tuples yield unrelated engine seeds and
/// adding cells never perturbs the randomness of existing ones.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t rep,
                                    Substream which) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ cell);
    h = splitmix64(h ^ (rep + 0x5851F42D4C957F2DULL));
    h = splitmix64(h ^ (static_cast<std::uint64_t>(which) * 0x2545F4914F6CDD1DULL));
    return h;
}

/// Random stream handed to samplers. Output is a deterministic function of the
/// seed for a fixed standard library implementation.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const { return seed_; }
    double normal() { return gauss_(engine_); }
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    std::mt19937_64& engine() { return engine_; }

    /// Child stream derived from this stream's seed and an index.
    RngStream split(std::uint64_t index) const { return RngStream(splitmix64(seed_ ^ splitmix64(index + 1))); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> gauss_{0.0, 1.0};
};

}  // namespace speclab
