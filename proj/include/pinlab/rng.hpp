#pragma once

#include <cstdint>
#include <span>

namespace pinlab {

// Fixed, named PRNG stack: splitmix64 expands a user seed into the state
// of a xoshiro256++ generator.  The exact algorithms are part of the
// project contract -- every published number must be reproducible from
// (algorithm, seed) alone, so implementation-default RNGs are not used
// anywhere.

struct SplitMix64 {
  uint64_t state;
  explicit SplitMix64(uint64_t seed) : state(seed) {}
  uint64_t next();
};

class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(uint64_t seed);

  uint64_t next_u64();

  // [0, 1) with 53 random bits.
  double next_unit();
  // (0, 1], safe under log().
  double next_unit_open();
  // Box-Muller, cosine branch only; consumes exactly two words per call.
  double next_gaussian();
  // Sign bit of one word: +1 / -1.
  double next_rademacher();
  // [-a, a) by affine map of one word.
  double next_uniform_sym(double half_width);

 private:
  uint64_t s_[4];
};

// FNV-1a 64-bit, the integrity checksum used by every binary format and
// provenance record in the project.
class Fnv1a {
 public:
  void update(std::span<const unsigned char> bytes);
  void update_u64(uint64_t v);   // little-endian byte order
  void update_double(double v);  // IEEE-754 bits, little-endian
  uint64_t digest() const { return hash_; }

 private:
  uint64_t hash_ = 0xcbf29ce484222325ULL;
};

uint64_t fnv1a_bytes(std::span<const unsigned char> bytes);

}  // namespace pinlab
