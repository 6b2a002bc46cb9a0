#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace hsikit {

// ----------------------------------------------------------------------------
// Error hierarchy. The CLI maps these onto stable exit codes.
// ----------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : Error {
    using Error::Error;
};
struct FormatError : Error {
    using Error::Error;
};
struct ShapeError : Error {
    using Error::Error;
};
struct BoundsError : Error {
    using Error::Error;
};
struct ParamError : Error {
    using Error::Error;
};
struct VocabError : Error {
    using Error::Error;
};

// ----------------------------------------------------------------------------
// Deterministic seeding.
//
// mix64 is the public sub-seed derivation: item seed = mix64(master, index).
// It is the SplitMix64 finalizer (Stafford variant 13) applied to
// seed XOR index * golden gamma. The constants below are part of the output
// contract so third parties can reproduce datasets.
// ----------------------------------------------------------------------------

constexpr std::uint64_t kMixGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t seed, std::uint64_t n) {
    std::uint64_t z = seed ^ (n * kMixGamma);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// SplitMix64 stream. Small, fast, and identical on every platform, which is
// what the byte-reproducibility contract needs. std:: distributions are
// implementation-defined and must not be used anywhere in the library.
class Rng64 {
public:
    explicit Rng64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += kMixGamma;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Inclusive integer range. Modulo bias is ~2^-64 per draw and accepted;
    // the draw sequence, not perfect equidistribution, is the contract.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    // Box-Muller, one value per pair of uniforms, no cached state.
    double normal(double mean = 0.0, double sigma = 1.0) {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        return mean + sigma * r * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t state_;
};

// Closed parameter ranges a degradation draws from.
struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

struct IntRange {
    int lo = 0;
    int hi = 0;
};

}  // namespace hsikit
