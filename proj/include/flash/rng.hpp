#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace flash {

// Seeded random source. Uniform draws and index sampling are computed from
// raw mt19937_64 output rather than <random> distributions, so a given seed
// produces the same stream with every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform double in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n). Lemire's multiply-shift with rejection.
    std::size_t below(std::size_t n) {
        const std::uint64_t bound = n;
        std::uint64_t x = engine_();
        __uint128_t m = static_cast<__uint128_t>(x) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                x = engine_();
                m = static_cast<__uint128_t>(x) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::size_t>(m >> 64);
    }

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[below(i)]);
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& items) { shuffle(std::span<T>(items)); }

    // Positions of k distinct elements out of n, in draw order
    // (partial Fisher-Yates).
    std::vector<std::size_t> sample_positions(std::size_t n, std::size_t k) {
        std::vector<std::size_t> pos(n);
        for (std::size_t i = 0; i < n; ++i) pos[i] = i;
        for (std::size_t i = 0; i < k && i < n; ++i) {
            std::swap(pos[i], pos[i + below(n - i)]);
        }
        pos.resize(k < n ? k : n);
        return pos;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace flash
