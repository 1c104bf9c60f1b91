#pragma once

#include <cstdint>
#include <limits>

namespace dtapb {

/// Finalizer of SplitMix64 (a bijective 64-bit mixer).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: the n-th output is mix64(base + n * gamma), so a
/// stream is fully determined by its key and never depends on what other
/// streams have drawn.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key) : state_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() {
    state_ += kGamma;
    return mix64(state_);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

/// Derives independent stream keys from (master seed, condition, replicate,
/// stream index).
struct ReplicateKey {
  std::uint64_t seed = 0;
  std::uint64_t condition = 0;
  std::uint64_t replicate = 0;

  constexpr std::uint64_t key(std::uint64_t stream) const {
    std::uint64_t h = mix64(seed ^ 0x5851f42d4c957f2dULL);
    h = mix64(h ^ (condition + 0x14057b7ef767814fULL));
    h = mix64(h ^ (replicate + 0x2545f4914f6cdd1dULL));
    return mix64(h ^ (stream + 0x9e3779b97f4a7c15ULL));
  }

  CounterRng stream(std::uint64_t index) const { return CounterRng(key(index)); }
};

}  // namespace dtapb
