#pragma once

#include <cstdint>

namespace dsrc {

/// splitmix64: 64-bit counter-based generator (Vigna's constants). One
/// multiply-xorshift pipeline per draw, 2^64 period, trivially seedable.
///
/// Every random draw in the simulator goes through this class; std::
/// distributions are implementation-defined and must not be used anywhere a
/// reproducible stream is required. Bit-exact output across platforms is a
/// contract.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1) with 53 significant bits.
    double uniform01() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform in {0,...,n-1} via 128-bit multiply-high. The modulo bias is
    /// below n/2^64, far under anything a simulation could resolve.
    std::uint64_t below(std::uint64_t n) noexcept {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    int uniform_int(int n) noexcept {
        return static_cast<int>(below(static_cast<std::uint64_t>(n)));
    }

private:
    std::uint64_t state_;
};

/// Stream seed for replication r. The xor'ed index is decorrelated by the
/// generator's output mix, so nearby replications do not share structure.
inline std::uint64_t replication_seed(std::uint64_t base, std::uint64_t r) noexcept {
    return base ^ r;
}

/// Deterministic seed derivation for sweep rows (chainable).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
    SplitMix64 g(a ^ (0x9E3779B97F4A7C15ULL + b));
    return g.next();
}

}  // namespace dsrc
