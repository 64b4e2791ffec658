#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace debtlab {

/// Deterministic 64-bit generator (xoshiro256** seeded through splitmix64).
/// Hand-rolled so that every stream is reproducible independently of the
/// platform's standard library. Substreams are derived from the root seed,
/// not from the evolving state, so forking a stream is order-independent.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();

    /// Uniform double in [0, 1).
    double uniform();
    double uniform(double lo, double hi);

    /// Standard normal via Box-Muller (two uniforms per draw).
    double normal();
    double normal(double mean, double sd);

    /// Unbiased integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    /// Draws a category from nonnegative weights (need not be normalized).
    std::size_t weighted(const std::vector<double>& weights);

    /// k distinct indices from [0, n), in ascending order.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    Rng substream(std::uint64_t tag) const;
    Rng substream(std::string_view name) const;

    std::uint64_t root_seed() const { return root_seed_; }

private:
    std::uint64_t root_seed_ = 0;
    std::array<std::uint64_t, 4> state_{};
};

/// FNV-1a 64-bit hash, used for substream naming and output checksums.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64(std::string_view s);

}  // namespace debtlab
