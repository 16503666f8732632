#pragma once

#include <cstdint>
#include <random>

namespace jointgraph {

/// Seedable generator with platform-independent output.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard.
/// The standard library distributions are not, so uniform, integer and
/// normal draws are implemented here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream for (purpose, group, replicate), derived through
  /// std::seed_seq, which is also fully specified.
  static Rng substream(std::uint64_t seed, std::uint32_t purpose, std::uint32_t group,
                       std::uint32_t replicate);

  std::uint64_t next_u64() { return engine_(); }
  double uniform();                         // [0, 1), 53-bit resolution
  std::uint64_t below(std::uint64_t bound);  // uniform in [0, bound), unbiased
  double normal();                          // standard normal, Marsaglia polar

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Substream purposes.
enum StreamPurpose : std::uint32_t {
  kStreamEdges = 1,
  kStreamWeights = 2,
  kStreamScores = 3,
  kStreamNoise = 4,
};

}  // namespace jointgraph
