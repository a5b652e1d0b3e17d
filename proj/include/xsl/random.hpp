#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace xsl {

// Portable seeded randomness. The engine is std::mt19937_64 (fully specified by
// the standard); the distributions below are written out because the standard
// library ones are implementation-defined and would break byte-determinism
// across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    // Uniform in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n);
    // Uniform in [lo, hi].
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        return lo + uniform_index(hi - lo + 1);
    }

private:
    std::mt19937_64 engine_;
};

// splitmix64 finalizer; derives independent child seeds from (seed, stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// Truncated Zipf over ranks 0..n-1 with P(rank k) proportional to 1/(k+1)^s.
class ZipfSampler {
public:
    ZipfSampler(std::size_t n, double exponent);

    std::size_t size() const noexcept { return weights_.size(); }
    double probability(std::size_t rank) const { return weights_[rank]; }

    std::size_t sample(Rng& rng) const;
    // Draws `count` distinct ranks, each draw proportional to Zipf weight among
    // the ranks not yet taken. Requires count <= size().
    std::vector<std::size_t> sample_distinct(Rng& rng, std::size_t count) const;

private:
    std::size_t search(double mass) const;

    std::vector<double> weights_;  // normalized
    std::vector<double> cdf_;      // cdf_[k] = sum of weights_[0..k]
};

}  // namespace xsl
