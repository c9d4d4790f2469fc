#pragma once

#include <cstdint>

namespace rclab {

// Counter-based splittable generator: output i of stream s is a strong
// 64-bit hash of (seed, s, i).  Streams can be handed to workers without
// coordination and every draw is reproducible from (seed, stream, counter).
class SplitRng {
  public:
    SplitRng() : SplitRng(0, 0) {}
    SplitRng(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {
        key_ = mix(seed_ + GOLDEN) ^ mix(stream_ * GOLDEN + 1);
    }

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }

    SplitRng split(uint64_t substream) const {
        return SplitRng(seed_, mix(stream_ + GOLDEN * (substream + 1)));
    }

    uint64_t next() { return mix(key_ + GOLDEN * ++counter_); }

    // uniform in [0,1) with 53 random bits
    double uniform01() { return (next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // uniform in [0, n)
    uint64_t below(uint64_t n) {
        return (uint64_t)(((__uint128_t)next() * n) >> 64);
    }

  private:
    static constexpr uint64_t GOLDEN = 0x9E3779B97F4A7C15ull;

    static uint64_t mix(uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    uint64_t seed_;
    uint64_t stream_;
    uint64_t key_;
    uint64_t counter_ = 0;
};

} // namespace rclab
