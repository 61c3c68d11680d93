#pragma once

#include <algorithm>
#include <cstdint>
#include <random>

namespace fibereq {

// Independent purposes draw from independent streams.
enum class Stream : std::uint64_t {
  kData = 1,
  kNoise = 2,
  kNeighbor = 3,
  kInit = 4,
  kShuffle = 5,
  kPoint = 6,
  kTestFrame = 7,
  kTrainFrame = 8,
  kMismatchTrain = 9,
};

std::uint64_t splitmix64(std::uint64_t& state);

// Mixes a base seed with a stream tag and an index into a new 64-bit seed.
std::uint64_t derive_seed(std::uint64_t base, Stream stream, std::uint64_t index = 0);

/// Mersenne-Twister backed generator (period 2^19937-1). Uniform and normal
/// variates are produced by explicit formulas so sequences do not depend on
/// the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  static Rng stream(std::uint64_t base, Stream s, std::uint64_t index = 0) {
    return Rng(derive_seed(base, s, index));
  }

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, n) without modulo bias.
  std::uint64_t below(std::uint64_t n);
  double normal();

  template <typename It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const auto j = below(i);
      std::iter_swap(first + (i - 1), first + j);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fibereq
