#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace fedring {

// Keyed counter-style generator (splitmix64 walk). Every consumer derives its
// own stream from (seed, name, substream ids); there is no global RNG state,
// so concurrent workers cannot perturb each other's draw sequences.
class RngStream {
public:
    explicit RngStream(uint64_t key) : state_(key) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; always consumes exactly two draws so the sequence carries
    // no hidden parity state.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // Unbiased draw in [0, n), n > 0.
    uint64_t below(uint64_t n) {
        uint64_t threshold = (0 - n) % n;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

private:
    uint64_t state_;
};

// Key derivation: fnv1a over the stream name, folded with the seed and the
// optional substream indices. Distinct (seed, stream, subs) never share keys
// in practice, which is what the determinism contract needs.
uint64_t stream_key(uint64_t seed, std::string_view stream);
uint64_t mix_key(uint64_t key, uint64_t sub);

RngStream seeded_rng(uint64_t seed, std::string_view stream);
RngStream seeded_rng(uint64_t seed, std::string_view stream, uint64_t a);
RngStream seeded_rng(uint64_t seed, std::string_view stream, uint64_t a, uint64_t b);
RngStream seeded_rng(uint64_t seed, std::string_view stream, uint64_t a, uint64_t b,
                     uint64_t c);

}  // namespace fedring
