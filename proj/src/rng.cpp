#include "fedring/rng.hpp"

namespace fedring {

namespace {

uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdull;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ull;
    return z ^ (z >> 33);
}

}  // namespace

uint64_t stream_key(uint64_t seed, std::string_view stream) {
    return mix64(mix64(seed + 0x9e3779b97f4a7c15ull) ^ fnv1a(stream));
}

uint64_t mix_key(uint64_t key, uint64_t sub) {
    return mix64(key + 0x9e3779b97f4a7c15ull * (sub + 1));
}

RngStream seeded_rng(uint64_t seed, std::string_view stream) {
    return RngStream(stream_key(seed, stream));
}

RngStream seeded_rng(uint64_t seed, std::string_view stream, uint64_t a) {
    return RngStream(mix_key(stream_key(seed, stream), a));
}

RngStream seeded_rng(uint64_t seed, std::string_view stream, uint64_t a, uint64_t b) {
    return RngStream(mix_key(mix_key(stream_key(seed, stream), a), b));
}

RngStream seeded_rng(uint64_t seed, std::string_view stream, uint64_t a, uint64_t b,
                     uint64_t c) {
    return RngStream(mix_key(mix_key(mix_key(stream_key(seed, stream), a), b), c));
}

}  // namespace fedring
