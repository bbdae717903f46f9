#pragma once

#include <cmath>
#include <cstdint>

namespace attrflow {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t hash_combine(uint64_t a, uint64_t b) {
    uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64(s);
}

// Deterministic, platform-independent RNG. All randomness in the project
// flows through explicit seeds; never wall-clock.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {
        // warm up so that small seeds do not produce correlated low bits
        splitmix64(state_);
    }

    uint64_t next_u64() { return splitmix64(state_); }

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n)
    int uniform_int(int n) {
        return static_cast<int>(next_u64() % static_cast<uint64_t>(n));
    }

    // standard normal via Box-Muller (one sample per call, no cached spare)
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // independent stream derived from this one's seed and a stream id
    Rng fork(uint64_t stream_id) const { return Rng(hash_combine(state_, stream_id)); }

private:
    uint64_t state_;
};

}  // namespace attrflow
