// Deterministic random streams.
//
// Every randomized routine in the library takes an explicit seed and derives
// per-trial streams with derive(seed, trial).  Trials are therefore
// independent of threading and shardable: running trials [0,n) in one pass
// and merging two half-shards give identical results.
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "latlab/core.hpp"

namespace latlab {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {
    // warm up so that small seeds decorrelate
    next_u64();
    next_u64();
  }

  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    return Rng(seed + 0xbf58476d1ce4e5b9ull * (stream + 1));
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in [0,1) with 53 random bits
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * u01(); }

  // strictly positive Exp(1) variate
  double exponential() {
    double u;
    do {
      u = u01();
    } while (u <= 0.0);
    return -std::log(u);
  }

  double sign() { return (next_u64() & 1ull) ? 1.0 : -1.0; }

  // integer in [lo, hi] inclusive
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  // k distinct indices drawn from [lo, hi], returned sorted
  std::vector<Index> distinct_indices(std::int64_t lo, std::int64_t hi, int k) {
    std::vector<Index> out;
    while (static_cast<int>(out.size()) < k) {
      Index cand = integer(lo, hi);
      bool dup = false;
      for (Index i : out) dup = dup || (i == cand);
      if (!dup) out.push_back(cand);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::uint64_t state_;
};

}  // namespace latlab
