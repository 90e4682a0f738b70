#pragma once

#include <cstdint>
#include <initializer_list>

namespace rlnc {

// Deterministic PRNG used everywhere in the toolkit. We avoid <random>
// distributions because their output is implementation-defined; every draw
// here is bit-reproducible across compilers and platforms.
//
// Stream model: one master 64-bit seed per run. Each encoder, decoder,
// channel, trial, ... derives an independent stream by hashing the master
// seed with a small integer path (Rng::derive). Streams derived from
// distinct paths never share state.
class Rng {
public:
    explicit Rng(uint64_t seed) {
        // splitmix64 expansion of the seed into xoshiro256** state
        uint64_t x = seed;
        for (auto& word : state_) word = splitmix(x);
    }

    uint64_t next() {
        const uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform integer in [0, bound). Rejection sampling, no modulo bias.
    uint32_t below(uint32_t bound) {
        const uint64_t span = 1ull << 32;
        const uint64_t limit = span - span % bound;
        for (;;) {
            const uint64_t v = next() >> 32;
            if (v < limit) return static_cast<uint32_t>(v % bound);
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Hash a master seed with a path of integers into a stream seed.
    static uint64_t derive(uint64_t master, std::initializer_list<uint64_t> path) {
        uint64_t h = master;
        h = splitmix(h);
        for (uint64_t p : path) {
            h ^= p + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h = splitmix(h);
        }
        return h;
    }

private:
    static uint64_t splitmix(uint64_t& x) {
        uint64_t z = (x += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    uint64_t state_[4];
};

// Stream tags. Keeping them in one place guarantees two subsystems never
// derive the same stream from the same master seed.
namespace stream {
inline constexpr uint64_t encoder = 0x01;
inline constexpr uint64_t window = 0x02;
inline constexpr uint64_t channel = 0x03;
inline constexpr uint64_t trial = 0x04;
inline constexpr uint64_t block = 0x05;
inline constexpr uint64_t leg = 0x06;
}  // namespace stream

}  // namespace rlnc
