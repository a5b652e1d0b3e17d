#include "xsl/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xsl/error.hpp"

namespace xsl {

std::uint64_t Rng::uniform_index(std::uint64_t n) {
    if (n == 0) throw Error("uniform_index: empty range");
    // Rejection keeps the result unbiased: accept only draws below the largest
    // multiple of n.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

ZipfSampler::ZipfSampler(std::size_t n, double exponent) {
    if (n == 0) throw ConfigError("Zipf sampler needs a non-empty vocabulary");
    if (!(exponent > 0.0) || !std::isfinite(exponent)) {
        throw ConfigError("Zipf exponent must be a finite positive number");
    }
    weights_.resize(n);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        weights_[k] = std::pow(static_cast<double>(k + 1), -exponent);
        total += weights_[k];
    }
    cdf_.resize(n);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        weights_[k] /= total;
        acc += weights_[k];
        cdf_[k] = acc;
    }
    cdf_.back() = 1.0;
}

std::size_t ZipfSampler::search(double mass) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), mass);
    if (it == cdf_.end()) --it;
    return static_cast<std::size_t>(it - cdf_.begin());
}

std::size_t ZipfSampler::sample(Rng& rng) const { return search(rng.uniform01()); }

std::vector<std::size_t> ZipfSampler::sample_distinct(Rng& rng, std::size_t count) const {
    if (count > size()) throw ConfigError("cannot draw more distinct ranks than the vocabulary");
    std::vector<std::size_t> taken;  // kept sorted
    taken.reserve(count);
    std::vector<std::size_t> order;
    order.reserve(count);
    double taken_mass = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        // Draw a point in the untaken mass, then map it back onto the full CDF by
        // shifting past every taken rank at or before the candidate.
        const double target = rng.uniform01() * (1.0 - taken_mass);
        std::size_t rank = search(target);
        for (;;) {
            double shift = 0.0;
            for (std::size_t t : taken) {
                if (t <= rank) shift += weights_[t];
            }
            std::size_t next = search(target + shift);
            while (std::binary_search(taken.begin(), taken.end(), next) && next + 1 < size()) ++next;
            if (next == rank) break;
            rank = next;
        }
        if (std::binary_search(taken.begin(), taken.end(), rank)) {
            // Rounding at the top of the CDF; fall back to the lowest-weight free rank.
            rank = size() - 1;
            while (std::binary_search(taken.begin(), taken.end(), rank)) --rank;
        }
        taken.insert(std::upper_bound(taken.begin(), taken.end(), rank), rank);
        taken_mass += weights_[rank];
        order.push_back(rank);
    }
    return order;
}

}  // namespace xsl
