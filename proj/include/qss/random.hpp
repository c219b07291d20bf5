#pragma once

#include <cstdint>

namespace qss {

/// SplitMix64 finalizer, used to derive independent per-trial seeds.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for trial `index` of a run seeded with `seed`. Depends only on the
/// pair, so parallel or reordered trials reproduce the same outcomes.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// SplitMix64 as a UniformRandomBitGenerator. Seeding is a single store,
/// which matters when every Monte-Carlo trial gets its own stream.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {
    }
    static constexpr result_type min() {
        return 0;
    }
    static constexpr result_type max() {
        return ~result_type{0};
    }
    result_type operator()() {
        const auto out = mix64(state_);
        state_ += 0x9e3779b97f4a7c15ULL;
        return out;
    }

  private:
    std::uint64_t state_;
};

/// Reproducible uniform stream. Owned by one caller at a time.
class SeededStream {
  public:
    explicit SeededStream(std::uint64_t seed) : engine_(seed) {
    }

    /// Uniform double in [0, 1) built from the top 53 bits, so the sequence is
    /// identical across standard library implementations.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

  private:
    SplitMix64 engine_;
};

}  // namespace qss
