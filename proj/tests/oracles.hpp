// Test-only reference implementations, kept independent of the library's
// computation paths.
//
// oracle_t_norm enumerates every admissible family by brute force, with no
// memoization and no packing DP.  Family values are accumulated right-to-left
// over blocks sorted by ascending minimum, the same evaluation order the
// library documents, so agreement can be asserted bit-for-bit.
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "latlab/core.hpp"
#include "latlab/tsirelson.hpp"

namespace latlab::testing {

namespace oracle_detail {

inline std::uint64_t oracle_growth(GrowthKind kind, Index n) {
  if (kind == GrowthKind::linear) return static_cast<std::uint64_t>(n);
  if (n >= 15) return UINT64_MAX;
  std::uint64_t r = 1;
  for (Index i = 0; i < n; ++i) r *= static_cast<std::uint64_t>(n + 1);
  return r;
}

struct OracleEnv {
  std::vector<Index> idx;
  std::vector<double> absval;
  AdmissibilityRule rule;
  GrowthKind growth;
  // plain value store so identical subproblems are enumerated once; the
  // enumeration itself stays brute force
  mutable std::map<std::vector<int>, double> memo;
};

inline double oracle_value(const OracleEnv& env, const std::vector<int>& positions);

// Assign each eligible element (ascending) to an existing block, a fresh
// block, or leave it unused; evaluate complete assignments.
inline void enumerate_families(const OracleEnv& env, const std::vector<int>& all,
                               const std::vector<int>& eligible, std::size_t at,
                               std::vector<std::vector<int>>& blocks, std::uint64_t max_blocks,
                               bool per_index_thresholds, double& best) {
  if (at == eligible.size()) {
    if (blocks.empty()) return;
    if (blocks.size() == 1 && blocks[0].size() == all.size()) return;  // half of itself
    double acc = 0.0;
    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it)
      acc = oracle_value(env, *it) + acc;
    best = std::max(best, 0.5 * acc);
    return;
  }
  const int elem = eligible[at];
  // unused
  enumerate_families(env, all, eligible, at + 1, blocks, max_blocks, per_index_thresholds, best);
  // join an existing block
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    blocks[b].push_back(elem);
    enumerate_families(env, all, eligible, at + 1, blocks, max_blocks, per_index_thresholds, best);
    blocks[b].pop_back();
  }
  // open a new block (elements arrive in ascending order, so this element is
  // the block's minimum and blocks are created in min order)
  if (blocks.size() < max_blocks) {
    if (!per_index_thresholds ||
        env.idx[static_cast<std::size_t>(elem)] >= static_cast<Index>(blocks.size()) + 1) {
      blocks.push_back({elem});
      enumerate_families(env, all, eligible, at + 1, blocks, max_blocks, per_index_thresholds, best);
      blocks.pop_back();
    }
  }
}

inline double oracle_value(const OracleEnv& env, const std::vector<int>& positions) {
  if (auto it = env.memo.find(positions); it != env.memo.end()) return it->second;

  double best = 0.0;
  for (int p : positions) best = std::max(best, env.absval[static_cast<std::size_t>(p)]);

  if (env.rule == AdmissibilityRule::min_after_n) {
    const Index max_index = env.idx[static_cast<std::size_t>(positions.back())];
    for (Index n = 1; n <= max_index; ++n) {
      std::vector<int> eligible;
      for (int p : positions)
        if (env.idx[static_cast<std::size_t>(p)] >= n) eligible.push_back(p);
      if (eligible.empty()) continue;
      std::vector<std::vector<int>> blocks;
      enumerate_families(env, positions, eligible, 0, blocks,
                         oracle_growth(env.growth, n), false, best);
    }
  } else {
    std::vector<std::vector<int>> blocks;
    enumerate_families(env, positions, positions, 0, blocks, UINT64_MAX, true, best);
  }
  env.memo[positions] = best;
  return best;
}

}  // namespace oracle_detail

inline double oracle_t_norm(const FiniteVector& v,
                            AdmissibilityRule rule = AdmissibilityRule::min_after_n,
                            GrowthKind growth = GrowthKind::power) {
  if (v.is_zero()) return 0.0;
  oracle_detail::OracleEnv env;
  env.rule = rule;
  env.growth = growth;
  for (const Entry& e : v.entries()) {
    env.idx.push_back(e.index);
    env.absval.push_back(std::fabs(e.value));
  }
  std::vector<int> all;
  for (std::size_t i = 0; i < env.idx.size(); ++i) all.push_back(static_cast<int>(i));
  return oracle_detail::oracle_value(env, all);
}

// Certificate admissibility checker (structure, not value).
inline bool certificate_admissible(const NormCertificate& cert, AdmissibilityRule rule,
                                   GrowthKind growth) {
  if (cert.is_leaf()) return true;
  if (cert.children.empty()) return false;
  std::vector<Index> mins;
  std::vector<Index> seen;
  for (const auto& [set, child] : cert.children) {
    if (set.empty()) return false;
    for (Index i : set) {
      for (Index j : seen)
        if (i == j) return false;  // disjointness
      seen.push_back(i);
    }
    mins.push_back(*std::min_element(set.begin(), set.end()));
    if (!certificate_admissible(child, rule, growth)) return false;
  }
  for (std::size_t j = 1; j < mins.size(); ++j)
    if (mins[j] <= mins[j - 1]) return false;  // sorted by ascending minimum
  if (rule == AdmissibilityRule::min_after_n) {
    if (cert.level_n < 1) return false;
    for (Index m : mins)
      if (m < cert.level_n) return false;
    if (static_cast<std::uint64_t>(cert.children.size()) >
        oracle_detail::oracle_growth(growth, cert.level_n))
      return false;
  } else {
    for (std::size_t j = 0; j < mins.size(); ++j)
      if (mins[j] < static_cast<Index>(j) + 1) return false;
  }
  return true;
}

}  // namespace latlab::testing
