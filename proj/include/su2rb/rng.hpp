#pragma once

#include <cstdint>

namespace su2rb {

// splitmix64 finalizer (Vigna's fixed-increment SplittableRandom variant).
// Used both as the stream generator and as the key-mixing function for
// deriving independent child streams.
inline uint64_t splitmix64_mix(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic random stream with cheap child-stream derivation.
// child(key) yields a stream that depends only on (stream id, key), never on
// how much of the parent stream has been consumed, so per-circuit streams are
// independent of evaluation order and thread count.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed) : id_(splitmix64_mix(seed ^ 0x5851f42d4c957f2dULL)), state_(id_) {}

  RandomStream child(uint64_t key) const {
    return RandomStream(FromId{}, splitmix64_mix(id_ ^ splitmix64_mix(key ^ 0xd6e8feb86659fd93ULL)));
  }

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 random bits.
  double uniform() { return (next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  uint64_t below(uint64_t n) {
    uint64_t threshold = (0 - n) % n;
    for (;;) {
      uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

 private:
  struct FromId {};
  RandomStream(FromId, uint64_t id) : id_(id), state_(id) {}
  uint64_t id_;
  uint64_t state_;
};

}  // namespace su2rb
