#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace crsim {

// Deterministic random stream. All sampling in the simulator goes through
// this wrapper so that a (seed, call order) pair fully determines every
// draw, independent of standard-library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform double in [0, 1) with 53 bits of precision.
    double next_unit() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). n must be positive.
    std::size_t next_below(std::size_t n) {
        if (n == 0) throw std::invalid_argument("Rng::next_below: n must be positive");
        // Rejection sampling to avoid modulo bias.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = gen_();
        while (v >= limit) v = gen_();
        return static_cast<std::size_t>(v % n);
    }

    bool next_bernoulli(double p) { return next_unit() < p; }

    // Samples an index from an unnormalized weight vector.
    std::size_t next_categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) {
            throw std::invalid_argument("Rng::next_categorical: weights sum to zero");
        }
        double u = next_unit() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        // Guard against accumulated floating-point shortfall.
        for (std::size_t i = weights.size(); i-- > 0;) {
            if (weights[i] > 0.0) return i;
        }
        return weights.size() - 1;
    }

    // Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::swap(values[i - 1], values[next_below(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

// Stable string hash (FNV-1a) used to derive per-conversation seeds.
inline std::uint64_t stable_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace crsim
