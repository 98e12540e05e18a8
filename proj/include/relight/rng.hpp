#pragma once

#include <cstdint>
#include <random>

namespace relight {

// SplitMix64 step; used to spread a master seed into substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic RNG wrapper. All draws go through explicitly defined
// mappings so that sequences are identical across platforms and build
// modes (std::uniform_*_distribution is implementation-defined, so it
// is not used here).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Substream seed for (master, stream). Streams with different ids are
    // statistically independent; the same pair always yields the same seed.
    static std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
        std::uint64_t s = master ^ (0x632be59bd9b4e019ULL * (stream + 1));
        std::uint64_t a = splitmix64(s);
        std::uint64_t b = splitmix64(s);
        return a ^ (b << 1);
    }

    static Rng derive(std::uint64_t master, std::uint64_t stream) {
        return Rng(stream_seed(master, stream));
    }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased draw from [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = gen_();
        while (x >= limit) x = gen_();
        return x % n;
    }

    int index(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 gen_;
};

}  // namespace relight
