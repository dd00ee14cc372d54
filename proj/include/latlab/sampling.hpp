// Seeded samplers shared by the estimators: ball points with signed
// exponential coordinates normalized to a uniform-radius law, pairs at a
// prescribed distance inside a ball, and the disjoint-family estimate for
// upper/lower p-estimates.
#pragma once

#include <utility>
#include <vector>

#include "latlab/rng.hpp"
#include "latlab/space.hpp"

namespace latlab {

// Direction with coordinatewise symmetric Exp(1) magnitudes on `support`,
// normalized to the sphere, then scaled by radius * U[0,1).
inline FiniteVector sample_ball_point(const Space& space, const std::vector<Index>& support,
                                      double radius, Rng& rng, const NormOptions& opt = {}) {
  std::vector<Entry> es;
  es.reserve(support.size());
  for (Index i : support) es.push_back({i, rng.sign() * rng.exponential()});
  FiniteVector d = FiniteVector::from_entries(std::move(es));
  const double nd = norm(space, d, opt);
  if (nd == 0.0) return {};
  return d.scaled(radius * rng.u01() / nd);
}

// A pair (x, y) with ||x - y|| <= t and both points inside ball(radius).
inline std::pair<FiniteVector, FiniteVector> sample_pair_within(
    const Space& space, const std::vector<Index>& support, double radius, double t, Rng& rng,
    const NormOptions& opt = {}) {
  FiniteVector x = sample_ball_point(space, support, radius, rng, opt);
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::vector<Entry> es;
    for (Index i : support) es.push_back({i, rng.sign() * rng.exponential()});
    FiniteVector w = FiniteVector::from_entries(std::move(es));
    const double nw = norm(space, w, opt);
    if (nw == 0.0) continue;
    FiniteVector y = x + w.scaled(t * rng.u01() / nw);
    if (norm(space, y, opt) <= radius) return {x, y};
    if (attempt % 10 == 9) x = x.scaled(0.85);  // pull the anchor inward
  }
  return {x, x};  // degenerate but valid pair
}

enum class EstimateDirection { upper, lower };

struct DisjointEstimate {
  double best_ratio = 0.0;  // extremal ||sum x_k|| / (sum ||x_k||^p)^{1/p}
  std::vector<FiniteVector> witness;
  std::uint64_t witness_trial = 0;
  int trials = 0;
  double p = 0.0;
  EstimateDirection direction = EstimateDirection::upper;
};

// Random families of disjointly supported vectors with min support index
// >= tail_start; the observed ratio is maximized (upper) or minimized
// (lower).  Deterministic per seed, trials shardable by derived streams.
inline DisjointEstimate estimate_disjoint_estimate(const Space& space, double p,
                                                   EstimateDirection direction, Index tail_start,
                                                   int trials, std::uint64_t seed,
                                                   const NormOptions& opt = {}) {
  if (trials < 1) throw std::invalid_argument("estimate_disjoint_estimate: trials must be >= 1");
  if (tail_start < 1)
    throw std::invalid_argument("estimate_disjoint_estimate: tail_start must be >= 1");
  DisjointEstimate out;
  out.trials = trials;
  out.p = p;
  out.direction = direction;
  out.best_ratio = (direction == EstimateDirection::upper)
                       ? 0.0
                       : std::numeric_limits<double>::infinity();

  const int max_total_support = 12;
  const Index lo = tail_start;
  const Index hi = tail_start + 4 * max_total_support;

  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(trial));
    const int nvec = static_cast<int>(rng.integer(1, 4));
    std::vector<int> sizes(nvec);
    int total = 0;
    for (int j = 0; j < nvec; ++j) {
      sizes[j] = static_cast<int>(rng.integer(1, std::max(1, max_total_support / nvec)));
      total += sizes[j];
    }
    std::vector<Index> pool = rng.distinct_indices(lo, hi, total);
    std::vector<std::vector<Entry>> parts(nvec);
    int v = 0;
    std::vector<int> remaining = sizes;
    for (Index i : pool) {
      while (remaining[v] == 0) v = (v + 1) % nvec;
      parts[v].push_back({i, rng.sign() * std::exp(rng.uniform(-1.5, 1.5))});
      --remaining[v];
      v = (v + 1) % nvec;
    }

    std::vector<FiniteVector> family;
    FiniteVector sum;
    double denom_pow = 0.0;
    for (auto& es : parts) {
      if (es.empty()) continue;
      FiniteVector x = FiniteVector::from_entries(std::move(es));
      sum = sum + x;
      denom_pow += std::pow(norm(space, x, opt), p);
      family.push_back(std::move(x));
    }
    const double ratio = norm(space, sum, opt) / std::pow(denom_pow, 1.0 / p);
    const bool better = (direction == EstimateDirection::upper) ? ratio > out.best_ratio
                                                                : ratio < out.best_ratio;
    if (better) {
      out.best_ratio = ratio;
      out.witness = family;
      out.witness_trial = static_cast<std::uint64_t>(trial);
    }
  }
  return out;
}

}  // namespace latlab
