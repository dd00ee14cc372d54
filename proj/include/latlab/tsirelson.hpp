// Exact computation of the implicitly defined Tsirelson-type norm
//
//   ||x|| = max( ||x||_inf , (1/2) sup_F sum_{E in F} ||E x|| )
//
// where F ranges over admissible families of pairwise disjoint finite index
// sets.  Two admissibility readings are provided:
//
//   min_after_n : for some level n, every set starts at index >= n and the
//                 family has at most growth(n) sets (default reading),
//   per_index   : the j-th set (ordered by minima) starts at index >= j;
//                 the family size is then self-limiting and the growth
//                 function plays no role.
//
// The exact norm runs a DP over support subsets (bitmask-indexed) plus a
// best-packing DP shared across admissibility levels, and returns a
// certificate tree that reproduces the value bit-for-bit: a family node's
// value is half the sum of its children accumulated right-to-left over the
// family sorted by ascending minimum.
#pragma once

#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "latlab/core.hpp"
#include "latlab/rng.hpp"

namespace latlab {

enum class AdmissibilityRule { min_after_n, per_index };
enum class GrowthKind { power, linear };

inline const char* to_string(AdmissibilityRule r) {
  return r == AdmissibilityRule::min_after_n ? "min-after-n" : "per-index";
}
inline const char* to_string(GrowthKind g) {
  return g == GrowthKind::power ? "power" : "linear";
}

// Family-size budget at admissibility level n.  power: (n+1)^n, saturating;
// linear: n.  Monotone nondecreasing, value >= 1 for n >= 1.
inline std::uint64_t growth_value(GrowthKind kind, Index n) {
  if (n < 1) throw std::invalid_argument("growth_value: n must be >= 1");
  if (kind == GrowthKind::linear) return static_cast<std::uint64_t>(n);
  if (n >= 15) return UINT64_MAX;  // (n+1)^n beyond any representable family
  std::uint64_t r = 1;
  for (Index i = 0; i < n; ++i) r *= static_cast<std::uint64_t>(n + 1);
  return r;
}

struct TsirelsonOptions {
  AdmissibilityRule rule = AdmissibilityRule::min_after_n;
  GrowthKind growth = GrowthKind::power;
  int support_cap = 12;        // exact-norm support limit
  int interval_block_cap = 32; // family-size clamp in the interval DP
  bool use_disk_cache = true;  // honored only when LAB_CACHE_DIR is set
};

// Witness tree for a norm value.  A leaf records the coordinate achieving the
// sup-norm term; a family node records the admissibility level (0 under the
// per-index rule) and the child certificates keyed by their index sets,
// sorted by ascending minimum.
struct NormCertificate {
  double value = 0.0;
  Index witness_index = 0;  // leaf payload
  Index level_n = 0;        // family payload (min-after-n rule)
  std::vector<std::pair<std::vector<Index>, NormCertificate>> children;

  bool is_leaf() const { return children.empty(); }
};

// Bottom-up re-evaluation of a certificate against the vector it witnesses.
// Family sums are accumulated right-to-left, matching the construction.
inline double recompute_certificate(const NormCertificate& cert, const FiniteVector& v) {
  if (cert.is_leaf()) {
    if (cert.witness_index == 0) return 0.0;  // zero vector
    return std::fabs(v.at(cert.witness_index));
  }
  double acc = 0.0;
  for (auto it = cert.children.rbegin(); it != cert.children.rend(); ++it)
    acc = recompute_certificate(it->second, v) + acc;
  return 0.5 * acc;
}

inline void dump_certificate(const NormCertificate& cert, std::ostream& os, int depth = 0) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  if (cert.is_leaf()) {
    os << pad << "leaf value=" << cert.value << " index=" << cert.witness_index << "\n";
    return;
  }
  os << pad << "node value=" << cert.value << " n=" << cert.level_n
     << " sets=" << cert.children.size() << "\n";
  for (const auto& [set, child] : cert.children) {
    os << pad << "  E={";
    for (std::size_t i = 0; i < set.size(); ++i) os << (i ? "," : "") << set[i];
    os << "}\n";
    dump_certificate(child, os, depth + 2);
  }
}

struct TNormExact {
  double value = 0.0;
  NormCertificate certificate;
};

namespace detail {

// Exact solver over one support set.  Bit i of a mask stands for the i-th
// smallest support index.
class TsirelsonExact {
 public:
  TsirelsonExact(const FiniteVector& v, const TsirelsonOptions& opt) : opt_(opt) {
    for (const Entry& e : v.entries()) {
      idx_.push_back(e.index);
      absval_.push_back(std::fabs(e.value));
    }
    k_ = static_cast<int>(idx_.size());
    if (k_ > opt.support_cap) {
      throw std::domain_error(
          "tsirelson: support size " + std::to_string(k_) + " exceeds the exact-norm cap " +
          std::to_string(opt.support_cap) + "; use t_norm_interval_lb for a scalable lower bound");
    }
    if (k_ > 0) run();
  }

  double value() const { return k_ == 0 ? 0.0 : t_[full_mask()]; }

  NormCertificate certificate() const {
    if (k_ == 0) return NormCertificate{};
    return build_certificate(full_mask());
  }

  double value_of_mask(std::uint32_t mask) const { return t_[mask]; }

 private:
  using Mask = std::uint32_t;

  struct Choice {
    bool family = false;
    Index leaf_index = 0;  // c0 witness
    Mask tail = 0;         // eligible set of the winning family
    int cap = 0;           // block budget used (min-after-n)
    Index n = 0;           // admissibility level (min-after-n)
    bool top = false;      // tail equals the mask itself (full-block exclusion applies)
  };

  Mask full_mask() const { return (k_ == 32) ? ~Mask(0) : ((Mask(1) << k_) - 1); }

  int cap_for(Index n) const {
    std::uint64_t g = growth_value(opt_.growth, n);
    return static_cast<int>(std::min<std::uint64_t>(g, static_cast<std::uint64_t>(k_)));
  }

  void run() {
    const Mask full = full_mask();
    t_.assign(std::size_t(full) + 1, 0.0);
    choice_.assign(std::size_t(full) + 1, Choice{});
    pack_.assign(static_cast<std::size_t>(k_) + 1,
                 std::vector<double>(std::size_t(full) + 1, 0.0));

    for (Mask mask = 1; mask <= full; ++mask) {
      compute_t(mask);
      if (opt_.rule == AdmissibilityRule::min_after_n) {
        for (int c = 1; c <= k_; ++c) pack_[c][mask] = pack_min_after(mask, c);
      } else {
        for (int c = k_ - 1; c >= 0; --c) pack_[c][mask] = pack_per_index(mask, c);
      }
      if (mask == full) break;  // avoid overflow when k_ == 32 (cap keeps k_ small anyway)
    }
  }

  // best sum of <= c disjoint block norms inside `mask` (blocks may skip
  // elements); min-after-n rule
  double pack_min_after(Mask mask, int c) const {
    if (mask == 0 || c == 0) return 0.0;
    const Mask low = mask & (~mask + 1);
    const Mask rest = mask ^ low;
    double best = pack_[c][rest];  // lowest element unused
    for (Mask sub = rest;; sub = (sub - 1) & rest) {
      const Mask block = low | sub;
      best = std::max(best, t_[block] + pack_[c - 1][mask ^ block]);
      if (sub == 0) break;
    }
    return best;
  }

  // best additional sum inside `mask` given `created` blocks already exist;
  // per-index rule: the next block must start at an index >= created+1
  double pack_per_index(Mask mask, int created) const {
    if (mask == 0) return 0.0;
    const Mask low = mask & (~mask + 1);
    const Mask rest = mask ^ low;
    double best = pack_[created][rest];
    const int bit = lowest_bit(mask);
    if (idx_[bit] >= static_cast<Index>(created) + 1 && created + 1 <= k_) {
      for (Mask sub = rest;; sub = (sub - 1) & rest) {
        const Mask block = low | sub;
        best = std::max(best, t_[block] + pack_[created + 1][mask ^ block]);
        if (sub == 0) break;
      }
    }
    return best;
  }

  // same DPs with the family consisting of the single set == `mask` excluded
  // (such a family only reproduces half the value being defined)
  double pack_top_min_after(Mask mask, int c) const {
    if (mask == 0 || c == 0) return 0.0;
    const Mask low = mask & (~mask + 1);
    const Mask rest = mask ^ low;
    double best = pack_[c][rest];
    for (Mask sub = rest;; sub = (sub - 1) & rest) {
      const Mask block = low | sub;
      if (block != mask) best = std::max(best, t_[block] + pack_[c - 1][mask ^ block]);
      if (sub == 0) break;
    }
    return best;
  }

  double pack_top_per_index(Mask mask) const {
    if (mask == 0) return 0.0;
    const Mask low = mask & (~mask + 1);
    const Mask rest = mask ^ low;
    double best = pack_[0][rest];
    for (Mask sub = rest;; sub = (sub - 1) & rest) {
      const Mask block = low | sub;
      if (block != mask) best = std::max(best, t_[block] + pack_[1][mask ^ block]);
      if (sub == 0) break;
    }
    return best;
  }

  void compute_t(Mask mask) {
    // sup-norm term; first coordinate attaining the max wins
    double best = 0.0;
    Index leaf = 0;
    for (int b = 0; b < k_; ++b) {
      if ((mask >> b) & 1u) {
        if (absval_[b] > best) {
          best = absval_[b];
          leaf = idx_[b];
        }
      }
    }
    Choice ch;
    ch.family = false;
    ch.leaf_index = leaf;

    if (opt_.rule == AdmissibilityRule::min_after_n) {
      // distinct eligible tails, identified by their lowest member
      for (int b = 0; b < k_; ++b) {
        if (!((mask >> b) & 1u)) continue;
        const Mask tail = mask & ~((Mask(1) << b) - 1);
        const Index n = idx_[b];
        const int cap = cap_for(n);
        const bool top = (tail == mask);
        const double fam =
            top ? pack_top_min_after(tail, cap) : pack_[cap][tail];
        const double cand = 0.5 * fam;
        if (cand > best) {
          best = cand;
          ch.family = true;
          ch.tail = tail;
          ch.cap = cap;
          ch.n = n;
          ch.top = top;
        }
      }
    } else {
      const double fam = pack_top_per_index(mask);
      const double cand = 0.5 * fam;
      if (cand > best) {
        best = cand;
        ch.family = true;
        ch.tail = mask;
        ch.cap = 0;
        ch.n = 0;
        ch.top = true;
      }
    }
    t_[mask] = best;
    choice_[mask] = ch;
  }

  static int lowest_bit(Mask m) {
    int b = 0;
    while (!((m >> b) & 1u)) ++b;
    return b;
  }

  // Re-walk the DP decisions; candidates are inspected in the computation
  // order, so the first exact match reproduces the stored optimum.
  std::vector<Mask> walk_min_after(Mask avail, int c, bool exclude_full) const {
    std::vector<Mask> blocks;
    while (avail != 0 && c > 0) {
      const double target =
          exclude_full ? pack_top_min_after(avail, c) : pack_[c][avail];
      const Mask low = avail & (~avail + 1);
      const Mask rest = avail ^ low;
      if (pack_[c][rest] == target) {
        avail = rest;
        exclude_full = false;
        continue;
      }
      bool found = false;
      for (Mask sub = rest;; sub = (sub - 1) & rest) {
        const Mask block = low | sub;
        if (!(exclude_full && block == avail)) {
          if (t_[block] + pack_[c - 1][avail ^ block] == target) {
            blocks.push_back(block);
            avail ^= block;
            --c;
            exclude_full = false;
            found = true;
            break;
          }
        }
        if (sub == 0) break;
      }
      if (!found) throw std::logic_error("tsirelson: certificate walk lost the optimum");
    }
    return blocks;
  }

  std::vector<Mask> walk_per_index(Mask avail, int created, bool exclude_full) const {
    std::vector<Mask> blocks;
    while (avail != 0) {
      const double target =
          exclude_full ? pack_top_per_index(avail) : pack_[created][avail];
      if (target == 0.0) break;
      const Mask low = avail & (~avail + 1);
      const Mask rest = avail ^ low;
      if (pack_[created][rest] == target) {
        avail = rest;
        exclude_full = false;
        continue;
      }
      bool found = false;
      const int bit = lowest_bit(avail);
      if (idx_[bit] >= static_cast<Index>(created) + 1 && created + 1 <= k_) {
        for (Mask sub = rest;; sub = (sub - 1) & rest) {
          const Mask block = low | sub;
          if (!(exclude_full && block == avail)) {
            if (t_[block] + pack_[created + 1][avail ^ block] == target) {
              blocks.push_back(block);
              avail ^= block;
              ++created;
              exclude_full = false;
              found = true;
              break;
            }
          }
          if (sub == 0) break;
        }
      }
      if (!found) throw std::logic_error("tsirelson: certificate walk lost the optimum");
    }
    return blocks;
  }

  NormCertificate build_certificate(Mask mask) const {
    const Choice& ch = choice_[mask];
    NormCertificate cert;
    cert.value = t_[mask];
    if (!ch.family) {
      cert.witness_index = ch.leaf_index;
      return cert;
    }
    cert.level_n = ch.n;
    std::vector<Mask> blocks =
        (opt_.rule == AdmissibilityRule::min_after_n)
            ? walk_min_after(ch.tail, ch.cap, ch.top)
            : walk_per_index(ch.tail, 0, ch.top);
    for (Mask b : blocks) {
      std::vector<Index> set;
      for (int bit = 0; bit < k_; ++bit)
        if ((b >> bit) & 1u) set.push_back(idx_[bit]);
      cert.children.emplace_back(std::move(set), build_certificate(b));
    }
    return cert;
  }

  TsirelsonOptions opt_;
  std::vector<Index> idx_;
  std::vector<double> absval_;
  int k_ = 0;
  std::vector<double> t_;
  std::vector<Choice> choice_;
  std::vector<std::vector<double>> pack_;
};

// ---- optional content-addressed value cache (LAB_CACHE_DIR) ----

inline std::string cache_key(const FiniteVector& v, const TsirelsonOptions& opt) {
  std::ostringstream os;
  os << "tnorm|" << to_string(opt.rule) << "|" << to_string(opt.growth);
  for (const Entry& e : v.entries()) {
    std::uint64_t bits;
    std::memcpy(&bits, &e.value, sizeof bits);
    os << "|" << e.index << ":" << std::hex << bits << std::dec;
  }
  return os.str();
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::optional<std::filesystem::path> cache_path_for(const std::string& key) {
  const char* dir = std::getenv("LAB_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return std::nullopt;
  std::ostringstream name;
  name << std::hex << fnv1a64(key) << ".tnorm";
  return std::filesystem::path(dir) / name.str();
}

inline std::optional<double> cache_lookup(const std::string& key) {
  auto path = cache_path_for(key);
  if (!path) return std::nullopt;
  std::ifstream in(*path);
  if (!in) return std::nullopt;
  std::string stored_key, hex;
  if (!std::getline(in, stored_key) || !std::getline(in, hex)) return std::nullopt;
  if (stored_key != key) return std::nullopt;  // hash collision; recompute
  std::uint64_t bits = 0;
  std::istringstream(hex) >> std::hex >> bits;
  double value;
  std::memcpy(&value, &bits, sizeof value);
  return value;
}

inline void cache_store(const std::string& key, double value) {
  auto path = cache_path_for(key);
  if (!path) return;
  std::error_code ec;
  std::filesystem::create_directories(path->parent_path(), ec);
  if (ec) return;
  std::uint64_t bits;
  std::memcpy(&bits, &value, sizeof bits);
  auto tmp = *path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) return;
    out << key << "\n" << std::hex << bits << "\n";
  }
  std::filesystem::rename(tmp, *path, ec);  // last writer wins
}

}  // namespace detail

// Exact norm with certificate.  Throws std::domain_error when the support
// exceeds opts.support_cap.
inline TNormExact t_norm_exact(const FiniteVector& v, const TsirelsonOptions& opts = {}) {
  detail::TsirelsonExact solver(v, opts);
  return {solver.value(), solver.certificate()};
}

// Exact norm value only; consults the LAB_CACHE_DIR content-addressed cache
// when enabled.
inline double t_norm_value(const FiniteVector& v, const TsirelsonOptions& opts = {}) {
  if (v.is_zero()) return 0.0;
  std::string key;
  if (opts.use_disk_cache) {
    key = detail::cache_key(v, opts);
    if (auto hit = detail::cache_lookup(key)) return *hit;
  }
  detail::TsirelsonExact solver(v, opts);
  double value = solver.value();
  if (opts.use_disk_cache && !key.empty()) detail::cache_store(key, value);
  return value;
}

// Norming functional read off the certificate: leaves give signed coordinate
// functionals, family nodes average their children with weight 1/2.  The
// result f satisfies <f, v> = ||v|| and has dual norm one; ties between
// optimal families resolve in certificate order.
inline FiniteVector t_norming_functional(const FiniteVector& v, const TsirelsonOptions& opts = {}) {
  struct Builder {
    const FiniteVector& v;
    FiniteVector run(const NormCertificate& c, double weight) {
      if (c.is_leaf()) {
        if (c.witness_index == 0) return {};
        double s = v.at(c.witness_index) < 0.0 ? -1.0 : 1.0;
        return FiniteVector::of({{c.witness_index, s * weight}});
      }
      FiniteVector acc;
      for (const auto& [set, child] : c.children) acc = acc + run(child, 0.5 * weight);
      return acc;
    }
  };
  TNormExact r = t_norm_exact(v, opts);
  Builder b{v};
  return b.run(r.certificate, 1.0);
}

// Lower bound from families of consecutive support intervals, computed by
// dynamic programming over segment partitions.  Never exceeds t_norm_exact
// where both are defined; family sizes are additionally clamped to
// opts.interval_block_cap, which keeps the restricted-supremum contract.
inline double t_norm_interval_lb(const FiniteVector& v, const TsirelsonOptions& opts = {}) {
  if (v.is_zero()) return 0.0;
  std::vector<Index> idx;
  std::vector<double> absval;
  for (const Entry& e : v.entries()) {
    idx.push_back(e.index);
    absval.push_back(std::fabs(e.value));
  }
  const int k = static_cast<int>(idx.size());
  const int cmax = std::min(opts.interval_block_cap, k);
  const bool per_index = opts.rule == AdmissibilityRule::per_index;

  auto cap_for = [&](Index n) {
    std::uint64_t g = growth_value(opts.growth, n);
    return static_cast<int>(std::min<std::uint64_t>(g, static_cast<std::uint64_t>(cmax)));
  };

  // V[a][b] = lower-bound norm of positions [a, b)
  std::vector<std::vector<double>> V(k, std::vector<double>(k + 1, 0.0));

  for (int b = 1; b <= k; ++b) {
    // g[pos][c]: min-after-n -> best sum of <= c blocks within [pos, b);
    //            per-index   -> best additional sum given c created blocks
    std::vector<std::vector<double>> g(k + 1, std::vector<double>(cmax + 2, 0.0));
    // chain[s]: best family whose first block starts exactly at s (own cap)
    std::vector<double> chain(k + 1, 0.0), suffmax(k + 2, 0.0);

    for (int a = b - 1; a >= 0; --a) {
      double c0 = 0.0;
      for (int i = a; i < b; ++i) c0 = std::max(c0, absval[i]);

      double fam = suffmax[a + 1];  // families not using position a
      if (per_index) {
        // first block [a, e); e == b would be the whole segment, skipped
        for (int e = a + 1; e < b; ++e)
          fam = std::max(fam, V[a][e] + g[e][1]);
      } else {
        const int cap = cap_for(idx[a]);
        for (int e = a + 1; e < b; ++e)
          fam = std::max(fam, V[a][e] + g[e][cap - 1]);
      }
      V[a][b] = std::max(c0, 0.5 * fam);

      // tables for use by enclosing segments (block [a, b) now allowed)
      if (per_index) {
        for (int c = cmax; c >= 0; --c) {
          double best = g[a + 1][c];
          if (idx[a] >= static_cast<Index>(c) + 1) {
            for (int e = a + 1; e <= b; ++e)
              best = std::max(best, V[a][e] + g[e][c + 1]);
          }
          g[a][c] = best;
        }
        suffmax[a] = std::max(g[a][0], suffmax[a + 1]);
      } else {
        const int cap = cap_for(idx[a]);
        double ch = 0.0;
        for (int e = a + 1; e <= b; ++e) ch = std::max(ch, V[a][e] + g[e][cap - 1]);
        chain[a] = ch;
        for (int c = 1; c <= cmax + 1; ++c) {
          double best = g[a + 1][c];
          for (int e = a + 1; e <= b; ++e)
            best = std::max(best, V[a][e] + g[e][c - 1]);
          g[a][c] = best;
        }
        suffmax[a] = std::max(chain[a], suffmax[a + 1]);
      }
    }
  }
  return V[0][k];
}

// p-convexified Tsirelson norm: t_norm(|v|^p)^{1/p}
inline double tp_norm(const FiniteVector& v, double p, const TsirelsonOptions& opts = {}) {
  if (!(p >= 1.0)) throw std::invalid_argument("tp_norm: p must be >= 1");
  if (v.is_zero()) return 0.0;
  if (p == 1.0) return t_norm_value(v, opts);
  return std::pow(t_norm_value(v.pointwise_power(p), opts), 1.0 / p);
}

// ---- blocking inequality check ----

struct Lemma54Result {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double epsilon = 0.0;
};

// m = 1 = m_1 < m_2 < ... < m_K marks block boundaries [m_k, m_{k+1}-1];
// a is a dense nonincreasing nonnegative sequence (a[0] = a_1) covered by the
// blocks, i.e. len(a) <= m_K - 1.  Checks
//   sup_k sum_{j=m_k}^{m_{k+1}-1} a_j  >=  (1+eps)^{-1/q} (sum_j a_j^q)^{1/q}
// with eps = sum_{k=2}^{K} (m_k - m_{k-1})^{1-q} over the supplied blocks.
inline Lemma54Result lemma54_check(const std::vector<Index>& m, const std::vector<double>& a,
                                   double q) {
  if (!(q > 1.0)) throw std::invalid_argument("lemma54_check: q must be > 1");
  if (m.size() < 2 || m.front() != 1)
    throw std::invalid_argument("lemma54_check: m must start at 1 and have >= 2 entries");
  for (std::size_t i = 1; i < m.size(); ++i)
    if (m[i] <= m[i - 1]) throw std::invalid_argument("lemma54_check: m must increase strictly");
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] < 0.0) throw std::invalid_argument("lemma54_check: a must be nonnegative");
    if (j > 0 && a[j] > a[j - 1])
      throw std::invalid_argument("lemma54_check: a must be nonincreasing");
  }
  if (static_cast<Index>(a.size()) > m.back() - 1)
    throw std::invalid_argument("lemma54_check: blocks must cover the support of a");

  Lemma54Result r;
  for (std::size_t i = 1; i < m.size(); ++i)
    r.epsilon += std::pow(static_cast<double>(m[i] - m[i - 1]), 1.0 - q);

  for (std::size_t i = 0; i + 1 < m.size(); ++i) {
    double block = 0.0;
    for (Index j = m[i]; j < m[i + 1]; ++j) {
      if (j - 1 < static_cast<Index>(a.size())) block += a[static_cast<std::size_t>(j - 1)];
    }
    r.lhs = std::max(r.lhs, block);
  }

  double power_sum = 0.0;
  for (double x : a) power_sum += std::pow(x, q);
  r.rhs = std::pow(1.0 + r.epsilon, -1.0 / q) * std::pow(power_sum, 1.0 / q);
  r.holds = r.lhs >= r.rhs * (1.0 - 1e-12);
  return r;
}

// ---- empirical lower-q estimate on tail spans ----

struct LowerQSearch {
  double q = 0.0;
  double p = 1.0;
  Index start_index = 0;       // ceil(2^{q/(q-1)})
  double proof_floor = 0.0;    // 2^{(-1-1/q)/p}
  double min_ratio = 0.0;
  std::vector<FiniteVector> witness;
  std::uint64_t witness_trial = 0;
  int trials = 0;
};

// Samples disjoint families supported past 2^{q/(q-1)} and reports the worst
// observed ratio ||sum x_j|| / (sum ||x_j||^{qp})^{1/(qp)} in the
// p-convexified norm.  The reported floor is an observation, not an asserted
// constant.
inline LowerQSearch lower_q_constant_search(double q, double p, int trials, std::uint64_t seed,
                                            const TsirelsonOptions& opts = {},
                                            Index index_limit = (Index(1) << 20)) {
  if (!(q > 1.0)) throw std::invalid_argument("lower_q_constant_search: q must be > 1");
  if (!(p >= 1.0)) throw std::invalid_argument("lower_q_constant_search: p must be >= 1");
  if (trials < 1) throw std::invalid_argument("lower_q_constant_search: trials must be >= 1");

  const double exponent = q / (q - 1.0);
  if (exponent > 60.0 || std::pow(2.0, exponent) > static_cast<double>(index_limit))
    throw std::domain_error("lower_q_constant_search: N(q)=2^{q/(q-1)} exceeds the practical index range");

  LowerQSearch out;
  out.q = q;
  out.p = p;
  out.trials = trials;
  out.start_index = static_cast<Index>(std::ceil(std::pow(2.0, exponent)));
  out.proof_floor = std::pow(2.0, (-1.0 - 1.0 / q) / p);
  out.min_ratio = std::numeric_limits<double>::infinity();

  const int cap = opts.support_cap;
  const Index lo = out.start_index;
  const Index hi = lo + 4 * cap;

  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(trial));
    const int nvec = static_cast<int>(rng.integer(1, 4));
    std::vector<int> sizes(nvec);
    int total = 0;
    for (int j = 0; j < nvec; ++j) {
      sizes[j] = static_cast<int>(rng.integer(1, std::max(1, cap / nvec)));
      total += sizes[j];
    }
    std::vector<Index> pool = rng.distinct_indices(lo, hi, total);
    // deal sorted indices round-robin so supports interleave
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
      denom_pow += std::pow(tp_norm(x, p, opts), q * p);
      family.push_back(std::move(x));
    }
    const double denom = std::pow(denom_pow, 1.0 / (q * p));
    const double ratio = tp_norm(sum, p, opts) / denom;
    if (ratio < out.min_ratio) {
      out.min_ratio = ratio;
      out.witness = family;
      out.witness_trial = static_cast<std::uint64_t>(trial);
    }
  }
  return out;
}

}  // namespace latlab
