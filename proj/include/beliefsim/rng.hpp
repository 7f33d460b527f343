#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace beliefsim {

/// SplitMix64 finalizer; full-avalanche 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct SplitMix64 {
  std::uint64_t state = 0;
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

/// xoshiro256++ stream. Self-contained so draws are bit-identical across
/// platforms and toolchains, which the trace replay contract depends on.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) {
    SplitMix64 sm{seed};
    for (auto& word : state_) word = sm.next();
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_{};
};

/// Independent stream identities hanging off one root seed.
enum class StreamPurpose : std::uint64_t {
  Signal = 0,    // private observations
  Action = 1,    // declared opinions
  Scenario = 2,  // network/likelihood generation
};

/// Root-seed split: every (agent, purpose) pair owns an independent stream,
/// so adding agents or reordering draws of one purpose never perturbs another.
inline std::uint64_t derive_stream_seed(std::uint64_t root, std::uint64_t agent,
                                        StreamPurpose purpose) {
  const std::uint64_t key =
      (agent << 2) | (static_cast<std::uint64_t>(purpose) & 0x3ULL);
  return mix64(root ^ mix64(key + 1));
}

/// Inverse-CDF draw over the declared index order. `u` in [0, 1).
/// Clamps to the last index so cumulative rounding never yields an
/// out-of-range result.
inline int draw_categorical(std::span<const double> probs, double u) {
  double cum = 0.0;
  const int last = static_cast<int>(probs.size()) - 1;
  for (int k = 0; k < last; ++k) {
    cum += probs[static_cast<std::size_t>(k)];
    if (u < cum) return k;
  }
  return last;
}

}  // namespace beliefsim
