#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace earsym {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed for an independent sub-stream of a master seed. Used to key per-subject
/// and per-image generators so parallel generation reproduces sequential output.
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(splitmix64(master) + 0x9E3779B97F4A7C15ull * (stream + 1));
}

/// mt19937_64 with hand-rolled Box-Muller. std::normal_distribution is
/// implementation-defined, so identical seeds would not give identical streams
/// across standard libraries; this does.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0, 1]: keeps the log finite
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Index in [0, n). Modulo bias is irrelevant at the sizes used here and the
    /// result is identical on every platform.
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace earsym
