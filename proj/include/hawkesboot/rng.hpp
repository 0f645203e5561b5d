#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace hawkesboot {

/// SplitMix64 finalizer; stateless 64-bit mix with good avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for the child stream identified by `path` under `master`.
///
/// Distinct paths give statistically independent streams, so replications
/// can run on any number of workers and still draw the same numbers.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = mix64(master ^ 0x5851f42d4c957f2dULL);
    for (std::uint64_t p : path) {
        s = mix64(s ^ mix64(p + 0x14057b7ef767814fULL));
    }
    return s;
}

/// Random stream with explicitly coded draw primitives.
///
/// All variate generation in the library goes through this class rather than
/// std::*_distribution, whose output sequences are implementation-defined;
/// this keeps seeded runs bit-reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1).
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Unit exponential draw, strictly positive.
    double exp1() { return -std::log(uniform01()); }

    /// Uniform integer in {0, ..., n-1}.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x = engine_();
        while (x >= limit) {
            x = engine_();
        }
        return x % n;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace hawkesboot
