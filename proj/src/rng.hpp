#pragma once

#include <cstdint>

namespace mwl {

// pcg64 (xsl-rr-128/64). One generator per (seed, stream): the stream index
// selects the LCG increment, so draws from distinct streams never collide
// and a run is bit-reproducible from the pair alone.
class Pcg64 {
 public:
  using u64 = std::uint64_t;
  using u128 = unsigned __int128;

  explicit Pcg64(u64 seed = 0, u64 stream = 0) {
    u128 initseq = (u128(mix(stream)) << 64) | mix(stream ^ 0xda3e39cb94b95bdbULL);
    u128 initstate = (u128(mix(seed)) << 64) | mix(seed ^ 0x9e3779b97f4a7c15ULL);
    inc_ = (initseq << 1) | 1u;
    state_ = 0u;
    step();
    state_ += initstate;
    step();
  }

  u64 next() {
    u128 s = state_;
    step();
    u64 xored = static_cast<u64>(s >> 64) ^ static_cast<u64>(s);
    unsigned rot = static_cast<unsigned>(s >> 122);
    return (xored >> rot) | (xored << (-rot & 63u));
  }

  // Uniform on the open interval (0,1); never 0 or 1, so it is always a
  // valid interior probability for inverse-CDF use.
  double uniform() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unbiased integer in [0, n), n >= 1 (Lemire rejection).
  u64 bounded(u64 n) {
    u128 m = u128(next()) * n;
    u64 lo = static_cast<u64>(m);
    if (lo < n) {
      u64 t = (0 - n) % n;
      while (lo < t) {
        m = u128(next()) * n;
        lo = static_cast<u64>(m);
      }
    }
    return static_cast<u64>(m >> 64);
  }

 private:
  static u64 mix(u64 z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  void step() { state_ = state_ * kMult + inc_; }

  static constexpr u128 kMult =
      (u128(2549297995355413924ULL) << 64) | 4865540595714422341ULL;

  u128 state_ = 0;
  u128 inc_ = 1;
};

}  // namespace mwl
