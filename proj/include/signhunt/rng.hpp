#pragma once

#include <cstdint>

namespace signhunt {

// Counter-based generator: draw k is a pure function of (seed, k), so the
// sequence is identical on every platform and can be enumerated serially
// ahead of any parallel work. The mixing function is the SplitMix64
// finalizer.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool coin() { return (next_u64() >> 63) != 0; }

  // Independent stream derived from this one's seed and a tag; does not
  // advance this stream.
  RngStream fork(std::uint64_t tag) const;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);
// Order-sensitive combination used for per-item seeds.
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);
std::uint64_t hash_string(std::uint64_t seed, const char* data, std::uint64_t len);

}  // namespace signhunt
