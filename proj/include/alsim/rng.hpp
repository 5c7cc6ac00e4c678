#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace alsim {

// All randomness in the engine flows through this wrapper. std::mt19937_64
// has a standardized output sequence, and the uniform mappings below avoid
// std::uniform_*_distribution, whose results are implementation-defined, so
// every draw is reproducible across platforms and compilers.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

class DetRng {
public:
    explicit DetRng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    // Independent per-entity stream: hash(seed, tag, salt). Used to give
    // every image its own generator so results do not depend on the order
    // images are visited.
    static DetRng derive(std::uint64_t seed, std::string_view tag, std::uint64_t salt = 0) {
        return DetRng(seed ^ splitmix64(fnv1a64(tag) + splitmix64(salt)));
    }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of precision.
    double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in [-1, 1].
    double next_signed() { return 2.0 * next_double() - 1.0; }

    // Uniform in [0, bound); bound must be positive.
    std::size_t next_index(std::size_t bound) {
        const auto wide = static_cast<unsigned __int128>(engine_());
        return static_cast<std::size_t>((wide * bound) >> 64);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace alsim
