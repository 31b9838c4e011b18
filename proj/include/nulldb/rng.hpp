#pragma once

#include <cstdint>

#include "nulldb/distribution.hpp"
#include "nulldb/value.hpp"

namespace nulldb {

// Counter-based pseudo-random numbers.  A draw is a pure function of
// (seed, stream, index), so any component can regenerate the exact draw
// another component used without sharing mutable state.  The mixer is the
// splitmix64 finalizer applied to a chain of the three inputs.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ mix64(stream + 0x632be59bd9b4e019ull));
  h = mix64(h ^ mix64(index + 0x9e6c63d0876a9a62ull));
  return h;
}

// Uniform draw in the open interval (0,1): 53 mantissa bits, offset by
// half an ulp so 0 and 1 are never produced.
inline double u01_from_bits(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

inline double counter_u01(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return u01_from_bits(counter_hash(seed, stream, index));
}

// Sequential view over one (seed, stream) counter line.
class RandomStream {
public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  double next_u01() { return counter_u01(seed_, stream_, counter_++); }
  std::uint64_t next_bits() { return counter_hash(seed_, stream_, counter_++); }
  // Integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return n ? next_bits() % n : 0; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

inline double dist_sample(const Distribution& d, RandomStream& rng) {
  return dist_quantile(d, rng.next_u01());
}

// The draw used for null `id` in Monte-Carlo sample `index`; both the
// sampling loop and the compiled query construction call this.
inline double null_draw(const Distribution& d, std::uint64_t seed, NullId id, std::uint64_t index) {
  return dist_quantile(d, counter_u01(seed, id, index));
}

} // namespace nulldb
