#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace matconv {

/// Deterministic counter-based generator (splitmix64 over a counter).
/// The same seed yields the same stream on every platform, and `split`
/// derives an independent stream, so budget shards can run concurrently.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), counter_(0) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * ++counter_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int n) {  // in [0, n)
        return static_cast<int>(next_u64() % static_cast<std::uint64_t>(n));
    }

    double normal() {
        // Box-Muller; draws a fresh pair each call to keep the stream
        // position independent of past usage patterns.
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    std::vector<double> vector(int n, double lo, double hi) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (double& x : v) x = uniform(lo, hi);
        return v;
    }

    /// Uniform on the unit sphere in R^n.
    std::vector<double> unit_vector(int n) {
        std::vector<double> v(static_cast<std::size_t>(n));
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (double& x : v) {
                x = normal();
                norm2 += x * x;
            }
        } while (norm2 < 1e-300);
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& x : v) x *= inv;
        return v;
    }

    /// Independent stream derived from this one.
    Rng split() { return Rng(next_u64() ^ 0xa5a5a5a5a5a5a5a5ULL); }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace matconv
