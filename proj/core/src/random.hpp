#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace crowdrank::detail {

// Draws built directly on mt19937_64 output, whose sequence the standard
// fixes; the <random> distributions are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform in [0, n).
    std::size_t index(std::size_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = 0;
        do {
            v = engine_();
        } while (v >= limit);
        return static_cast<std::size_t>(v % n);
    }

    /// Uniform integer in [lo, hi].
    long long between(long long lo, long long hi) {
        return lo + static_cast<long long>(index(static_cast<std::size_t>(hi - lo + 1)));
    }

    bool chance(double p) { return uniform() < p; }

    double normal(double mean, double sd) {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    template <typename It>
    void shuffle(It first, It last) {
        const auto n = static_cast<std::size_t>(last - first);
        for (std::size_t i = n; i > 1; --i) std::swap(first[i - 1], first[index(i)]);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace crowdrank::detail
