#pragma once

#include <cstdint>
#include <iterator>
#include <random>
#include <string_view>
#include <utility>

namespace kpa {

/// Seedable generator with a platform-independent stream.
///
/// The raw engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. Bounded draws and shuffles are implemented here rather than via
/// std::uniform_int_distribution, whose algorithm varies between standard
/// libraries.
class Rng {
public:
    static constexpr std::string_view kName = "mt19937_64";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be nonzero.
    std::uint64_t below(std::uint64_t bound) {
        // Rejection on the top of the range keeps the draw exactly uniform.
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
        std::uint64_t x = engine_();
        while (x > limit) {
            x = engine_();
        }
        return x % bound;
    }

    template <std::random_access_iterator It>
    void shuffle(It first, It last) {
        const auto count = static_cast<std::uint64_t>(last - first);
        for (std::uint64_t i = count; i > 1; --i) {
            const auto j = below(i);
            using std::swap;
            swap(first[i - 1], first[static_cast<std::ptrdiff_t>(j)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// Derives an independent seed for sub-stream `stream` (splitmix64 finalizer).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace kpa
