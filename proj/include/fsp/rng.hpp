#pragma once

#include <cstdint>
#include <vector>

namespace fsp {

// splitmix64. Counter-based: the state advances by a fixed odd increment and
// each output is a bijective mix of the counter, so the stream is identical
// on every platform. This is the only source of randomness in the project;
// the exact algorithm is documented in docs/data_dictionary.md.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // Uniform in [0, 1), 53 mantissa bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [0, bound) via the multiply-high mapping. The mapping has a
    // bias of at most bound/2^64, negligible at our scales, and avoids the
    // data-dependent loop of rejection sampling.
    std::uint64_t next_below(std::uint64_t bound) {
        using u128 = unsigned __int128;
        return static_cast<std::uint64_t>((static_cast<u128>(next_u64()) * bound) >> 64);
    }

    // Fisher-Yates, high index down.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices from [0, n), ascending. Partial Fisher-Yates then sort.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

private:
    std::uint64_t state_;
};

// Derived stream seed: the (stream+1)-th raw output of a SplitMix64 seeded at
// `base`. Gives every pipeline stage / fold / variant its own independent
// stream from one master seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return SplitMix64::mix(base + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

// Stage ids for derive_seed. Documented in docs/data_dictionary.md.
namespace rng_stream {
inline constexpr std::uint64_t kSplit = 1;
inline constexpr std::uint64_t kKfold = 2;
inline constexpr std::uint64_t kTrain = 3;
inline constexpr std::uint64_t kGenerate = 4;
inline constexpr std::uint64_t kCvFold = 5;
inline constexpr std::uint64_t kVariant = 6;
}  // namespace rng_stream

}  // namespace fsp
