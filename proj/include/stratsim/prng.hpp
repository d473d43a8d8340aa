#pragma once

#include <cstdint>

namespace stratsim {

/// Counter-based SplitMix64 stream. A stream is the pair (seed, index) and
/// the n-th draw is a pure function of both, so checkpointed runs and
/// re-implementations in other languages reproduce the same values exactly.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t start = 0) : seed_(seed), counter_(start) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + (++counter_) * 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0,1) with 53 significant bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Random sign, +1.0 or -1.0.
    double sign() { return (next_u64() & 1ull) ? 1.0 : -1.0; }

    std::uint64_t counter() const { return counter_; }

  private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

}  // namespace stratsim
