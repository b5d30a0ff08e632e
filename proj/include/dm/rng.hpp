#pragma once
#include <cstdint>
#include <random>
#include <stdexcept>

namespace dm {

// Deterministic RNG used throughout. mt19937_64 output is fully specified by
// the standard; std::uniform_*_distribution is not, so the draws below are
// hand-rolled to keep runs byte-identical across compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next() { return eng_(); }

    // uniform integer in [0, n), rejection sampled (no modulo bias)
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
        const std::uint64_t max = ~std::uint64_t{0};
        const std::uint64_t limit = max - max % n;  // largest multiple of n <= 2^64-1
        std::uint64_t v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % n;
    }

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    // uniform double in [0, 1), 53 random bits
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 eng_;
};

}  // namespace dm
