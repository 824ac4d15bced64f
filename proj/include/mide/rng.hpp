#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace mide {

// xoshiro256** (Blackman & Vigna) seeded through SplitMix64.
//
// Streams are derived from (seed, stream id) alone, so a substream does not
// depend on how much of the parent has been consumed. Normal variates use the
// Marsaglia polar method; integer draws use Lemire's rejection method.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  static Rng substream(std::uint64_t seed, std::uint64_t stream);
  Rng split(std::uint64_t stream) const { return substream(seed_, stream); }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();
  // Uniform on {0, ..., n - 1}; n must be positive.
  std::size_t uniform_index(std::size_t n);

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace mide
