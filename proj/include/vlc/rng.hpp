// Counter-based random streams. A stream is a pure function of (seed, stream id, index),
// so parallel loops draw the same numbers regardless of scheduling.
#pragma once

#include <cstdint>

namespace vlc {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0)
      : state_(splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return splitmix64(state_);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

// Stream ids; distinct per experiment kind so presets never share draws by accident.
namespace streams {
inline constexpr std::uint64_t kPairPlacement = 0x5049524cULL;
inline constexpr std::uint64_t kThreeRegion = 0x33524547ULL;
inline constexpr std::uint64_t kMobility = 0x4d4f4249ULL;
inline constexpr std::uint64_t kBranches = 0x4252414eULL;
}  // namespace streams

}  // namespace vlc
