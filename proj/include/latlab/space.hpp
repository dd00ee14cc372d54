// Composable descriptions of 1-unconditional sequence-space norms.
//
// A Space is an immutable constructor tree:
//
//   lp(p)                       p in [1, inf], sup norm at p = inf
//   tsirelson(opts)             the implicit norm from tsirelson.hpp
//   convexify(X, p)             ||x|| = || |x|^p ||_X^{1/p},  1 <= p < inf
//   interpolate(Y, Z, theta)    || x || = inf{ ||y||_Y^theta ||z||_Z^{1-theta} :
//                                              |x| = y^theta z^{1-theta} }
//   dual_of(X)                  sup{ <f, x> : ||x||_X <= 1 }
//   direct_sum(parts, outer)    parts act on disjoint index blocks; their
//                               norms are combined by the outer space
//
// Closed-form evaluation is used wherever the tree reduces to a single
// lp exponent (lp / convexify / dual chains).  The interpolation norm is an
// optimization-backed certified upper bound with a reported gap, and the
// dual norm of a non-reducible space is an ascent-backed certified lower
// bound with a gap estimated from restart spread; neither is ever silently
// treated as exact.
//
// Everything here is immutable after construction and safe for concurrent
// evaluation; randomized routines take explicit seeds through NormOptions.
#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "latlab/core.hpp"
#include "latlab/optimize.hpp"
#include "latlab/rng.hpp"
#include "latlab/tsirelson.hpp"

namespace latlab {

enum class SpaceKind { lp, tsirelson, convexify, interpolate, dual, direct_sum };

struct SpaceNode;
struct SpacePart;

class Space {
 public:
  Space() = default;

  static Space lp(double p);
  static Space lp_inf() { return lp(kInfExponent); }
  static Space tsirelson(TsirelsonOptions opts = {});
  static Space convexify(Space base, double p);
  // power-p lattice transform with p in (0,1): the 1/p-concavification.
  // The result is a norm only when the base is 1/p-convex with constant one;
  // callers owe that precondition (it holds in the duality recipes here).
  static Space concavify(Space base, double p);
  static Space interpolate(Space Y, Space Z, double theta);
  static Space dual_of(Space base);
  static Space direct_sum(std::vector<SpacePart> parts, Space outer);

  bool valid() const { return n_ != nullptr; }
  const SpaceNode& node() const;
  SpaceKind kind() const;
  std::string to_string() const;

 private:
  explicit Space(std::shared_ptr<const SpaceNode> n) : n_(std::move(n)) {}
  std::shared_ptr<const SpaceNode> n_;
};

// one summand of a direct sum, acting on the index block [lo, hi]
struct SpacePart {
  Index lo = 0, hi = 0;
  Space space;
};

struct SpaceNode {
  SpaceKind kind = SpaceKind::lp;
  double p = 2.0;          // lp exponent or convexification power
  double theta = 0.5;      // interpolation parameter
  TsirelsonOptions ts;     // tsirelson parameters
  Space a, b;              // base/Y and Z children
  Space outer;             // direct_sum combiner
  std::vector<SpacePart> parts;
};

inline const SpaceNode& Space::node() const {
  if (!n_) throw std::logic_error("Space: empty description");
  return *n_;
}
inline SpaceKind Space::kind() const { return node().kind; }

inline Space Space::lp(double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp: exponent must satisfy p >= 1");
  auto n = std::make_shared<SpaceNode>();
  n->kind = SpaceKind::lp;
  n->p = p;
  return Space(std::move(n));
}

inline Space Space::tsirelson(TsirelsonOptions opts) {
  auto n = std::make_shared<SpaceNode>();
  n->kind = SpaceKind::tsirelson;
  n->ts = opts;
  return Space(std::move(n));
}

inline Space Space::convexify(Space base, double p) {
  if (!(p >= 1.0) || std::isinf(p))
    throw std::invalid_argument("convexify: power must satisfy 1 <= p < inf");
  if (!base.valid()) throw std::invalid_argument("convexify: empty base");
  auto n = std::make_shared<SpaceNode>();
  n->kind = SpaceKind::convexify;
  n->p = p;
  n->a = std::move(base);
  return Space(std::move(n));
}

inline Space Space::concavify(Space base, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("concavify: power must lie in (0,1)");
  if (!base.valid()) throw std::invalid_argument("concavify: empty base");
  auto n = std::make_shared<SpaceNode>();
  n->kind = SpaceKind::convexify;
  n->p = p;
  n->a = std::move(base);
  return Space(std::move(n));
}

inline Space Space::interpolate(Space Y, Space Z, double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("interpolate: theta must lie in (0,1)");
  if (!Y.valid() || !Z.valid()) throw std::invalid_argument("interpolate: empty leg");
  auto n = std::make_shared<SpaceNode>();
  n->kind = SpaceKind::interpolate;
  n->theta = theta;
  n->a = std::move(Y);
  n->b = std::move(Z);
  return Space(std::move(n));
}

inline Space Space::dual_of(Space base) {
  if (!base.valid()) throw std::invalid_argument("dual_of: empty base");
  auto n = std::make_shared<SpaceNode>();
  n->kind = SpaceKind::dual;
  n->a = std::move(base);
  return Space(std::move(n));
}

inline Space Space::direct_sum(std::vector<SpacePart> parts, Space outer) {
  if (parts.empty()) throw std::invalid_argument("direct_sum: needs at least one part");
  if (!outer.valid()) throw std::invalid_argument("direct_sum: empty outer space");
  std::sort(parts.begin(), parts.end(), [](const SpacePart& x, const SpacePart& y) { return x.lo < y.lo; });
  Index prev_hi = 0;
  for (const SpacePart& part : parts) {
    if (part.lo < 1 || part.hi < part.lo)
      throw std::invalid_argument("direct_sum: malformed block");
    if (part.lo <= prev_hi) throw std::invalid_argument("direct_sum: block overlap");
    if (!part.space.valid()) throw std::invalid_argument("direct_sum: empty part space");
    prev_hi = part.hi;
  }
  auto n = std::make_shared<SpaceNode>();
  n->kind = SpaceKind::direct_sum;
  n->parts = std::move(parts);
  n->outer = std::move(outer);
  return Space(std::move(n));
}

inline std::string Space::to_string() const {
  const SpaceNode& n = node();
  std::ostringstream os;
  switch (n.kind) {
    case SpaceKind::lp:
      if (std::isinf(n.p)) os << "lp(inf)";
      else os << "lp(" << n.p << ")";
      break;
    case SpaceKind::tsirelson:
      os << "tsirelson(" << latlab::to_string(n.ts.rule) << "," << latlab::to_string(n.ts.growth)
         << ",cap=" << n.ts.support_cap << ")";
      break;
    case SpaceKind::convexify:
      os << "convexify(" << n.a.to_string() << "," << n.p << ")";
      break;
    case SpaceKind::interpolate:
      os << "interpolate(" << n.a.to_string() << "," << n.b.to_string() << ";theta=" << n.theta
         << ")";
      break;
    case SpaceKind::dual:
      os << "dual(" << n.a.to_string() << ")";
      break;
    case SpaceKind::direct_sum:
      os << "dsum[";
      for (std::size_t i = 0; i < n.parts.size(); ++i) {
        if (i) os << ",";
        os << n.parts[i].lo << ".." << n.parts[i].hi << ":" << n.parts[i].space.to_string();
      }
      os << ";outer=" << n.outer.to_string() << "]";
      break;
  }
  return os.str();
}

// Structural sanity walk; a depth guard rejects degenerate (cyclic) trees.
inline void validate(const Space& s, int depth = 0) {
  if (depth > 64) throw std::invalid_argument("space tree too deep (cyclic description?)");
  const SpaceNode& n = s.node();
  switch (n.kind) {
    case SpaceKind::lp:
    case SpaceKind::tsirelson:
      break;
    case SpaceKind::convexify:
    case SpaceKind::dual:
      validate(n.a, depth + 1);
      break;
    case SpaceKind::interpolate:
      validate(n.a, depth + 1);
      validate(n.b, depth + 1);
      break;
    case SpaceKind::direct_sum:
      for (const auto& part : n.parts) validate(part.space, depth + 1);
      validate(n.outer, depth + 1);
      break;
  }
}

// The single lp exponent a tree reduces to, when the reduction is exact:
// convexification multiplies the exponent, duality conjugates it.
inline std::optional<double> lp_exponent(const Space& s) {
  const SpaceNode& n = s.node();
  switch (n.kind) {
    case SpaceKind::lp:
      return n.p;
    case SpaceKind::convexify: {
      auto q = lp_exponent(n.a);
      if (!q) return std::nullopt;
      return std::isinf(*q) ? *q : *q * n.p;
    }
    case SpaceKind::dual: {
      auto q = lp_exponent(n.a);
      if (!q) return std::nullopt;
      if (*q == 1.0) return kInfExponent;
      if (std::isinf(*q)) return 1.0;
      return *q / (*q - 1.0);
    }
    default:
      return std::nullopt;
  }
}

struct NormOptions {
  double interp_residual_tol = 1e-13;  // factor-balance stopping residual
  int interp_max_iter = 4000;
  int dual_restarts = 8;               // seeded ascent restarts for dual norms
  int dual_entropic_iters = 90;
  std::uint64_t dual_seed = 20177;
  bool dual_polish = true;             // coordinate polish after the entropic phase
  double exact_tol = 1e-9;             // closed-form assertion tier
  double opt_tol = 1e-6;               // optimization-backed assertion tier
};

struct NormResult {
  double value = 0.0;
  double gap = 0.0;    // certified bracket width; 0 on closed-form paths
  bool exact = true;   // false when an optimizer produced the value
};

struct DualNormResult {
  double value = 0.0;        // certified lower bound (exact on closed forms)
  FiniteVector witness;      // near-unit vector attaining `value`
  double gap = 0.0;          // spread of restart values
  bool exact = false;
  bool converged = true;     // false when an iteration budget ran out
};

struct NormingFunctional {
  FiniteVector f;
  double attained = 0.0;  // <f, v>
};

NormResult norm_info(const Space& s, const FiniteVector& v, const NormOptions& opt = {});
DualNormResult dual_norm(const Space& s, const FiniteVector& f, const NormOptions& opt = {});
DualNormResult dual_norm_with_hint(const Space& s, const FiniteVector& f,
                                   const FiniteVector& hint, const NormOptions& opt = {});
NormingFunctional norming_functional(const Space& s, const FiniteVector& v,
                                     const NormOptions& opt = {});

inline double norm(const Space& s, const FiniteVector& v, const NormOptions& opt = {}) {
  return norm_info(s, v, opt).value;
}

namespace detail {

inline double lp_norm_value(double p, const FiniteVector& v) {
  if (v.is_zero()) return 0.0;
  if (std::isinf(p)) return v.linf();
  if (p == 1.0) return v.l1();
  double s = 0.0;
  for (const Entry& e : v.entries()) s += std::pow(std::fabs(e.value), p);
  return std::pow(s, 1.0 / p);
}

// split v by the direct-sum blocks; throws if any coordinate escapes
inline std::vector<FiniteVector> split_by_blocks(const SpaceNode& n, const FiniteVector& v) {
  std::vector<FiniteVector> parts(n.parts.size());
  std::vector<std::vector<Entry>> buckets(n.parts.size());
  for (const Entry& e : v.entries()) {
    bool placed = false;
    for (std::size_t k = 0; k < n.parts.size(); ++k) {
      if (e.index >= n.parts[k].lo && e.index <= n.parts[k].hi) {
        buckets[k].push_back(e);
        placed = true;
        break;
      }
    }
    if (!placed)
      throw std::invalid_argument("direct_sum: coordinate " + std::to_string(e.index) +
                                  " lies outside every block");
  }
  for (std::size_t k = 0; k < buckets.size(); ++k)
    parts[k] = FiniteVector::from_entries(std::move(buckets[k]));
  return parts;
}

// Factorization state for the interpolation norm.
struct InterpData {
  double value = 0.0;      // certified upper bound
  double lower = 0.0;      // dual-certificate lower bound
  double gap = 0.0;
  bool exact = false;
  bool converged = true;
  std::vector<Index> support;
  std::vector<double> gy, gz;  // leg norming functionals at the optimum (>= 0)
};

// Norm and norming measure of exp(w) against `space`, evaluated scale-safely
// (the max log is factored out; norms are homogeneous).
struct LogLeg {
  double log_norm = 0.0;
  std::vector<double> mu;  // normalized norming measure on the support
  std::vector<double> g;   // raw norming-functional coefficients
};

inline LogLeg eval_log_leg(const Space& space, const std::vector<Index>& support,
                           const std::vector<double>& w, const NormOptions& opt) {
  const double m = *std::max_element(w.begin(), w.end());
  std::vector<Entry> es;
  es.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    es.push_back({support[i], std::exp(std::max(w[i] - m, -700.0))});
  FiniteVector u = FiniteVector::from_entries(std::move(es));
  LogLeg leg;
  const double nu = norm(space, u, opt);
  leg.log_norm = m + std::log(nu);
  FiniteVector g = norming_functional(space, u, opt).f.abs();
  leg.mu.resize(w.size());
  leg.g.resize(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    leg.g[i] = g.at(support[i]);
    leg.mu[i] = leg.g[i] * u.at(support[i]) / nu;
  }
  return leg;
}

// Minimize theta*log||y||_Y + (1-theta)*log||z||_Z over factorizations
// |v| = y^theta z^{1-theta}, parametrized by w = log y with
// log z = (log|v| - theta*w)/(1-theta).  The optimality condition is the
// coordinatewise balance of the two norming measures; iterations step along
// the measure-log difference with a backtracked damping factor.  Every
// iterate is a feasible factorization, so the best objective seen is an
// upper bound; the dual functional gy^theta * gz^{1-theta} certifies a lower
// bound, and the difference is reported as the gap.
inline InterpData interpolate_factorize(const Space& Y, const Space& Z, double theta,
                                        const FiniteVector& vabs, const NormOptions& opt) {
  InterpData data;
  for (const Entry& e : vabs.entries()) data.support.push_back(e.index);
  const std::size_t k = data.support.size();
  if (k == 0) {
    data.exact = true;
    return data;
  }
  std::vector<double> la(k);
  for (std::size_t i = 0; i < k; ++i) la[i] = std::log(vabs.entries()[i].value);

  const auto py = lp_exponent(Y);
  const auto pz = lp_exponent(Z);

  // sup-norm legs admit an exact factorization: the sup-leg factor is the
  // all-ones vector and its norming functional is matched to the other leg's
  // norming measure
  if (pz && std::isinf(*pz)) {
    std::vector<double> w(k);
    for (std::size_t i = 0; i < k; ++i) w[i] = la[i] / theta;
    LogLeg leg = eval_log_leg(Y, data.support, w, opt);
    data.value = std::exp(theta * leg.log_norm);
    data.lower = data.value;
    data.gy = leg.g;
    data.gz = leg.mu;
    data.exact = norm_info(Y, vabs, opt).exact;
    data.gap = 0.0;
    return data;
  }
  if (py && std::isinf(*py)) {
    std::vector<double> w(k);
    for (std::size_t i = 0; i < k; ++i) w[i] = la[i] / (1.0 - theta);
    LogLeg leg = eval_log_leg(Z, data.support, w, opt);
    data.value = std::exp((1.0 - theta) * leg.log_norm);
    data.lower = data.value;
    data.gz = leg.g;
    data.gy = leg.mu;
    data.exact = norm_info(Z, vabs, opt).exact;
    data.gap = 0.0;
    return data;
  }

  std::vector<double> w = la;  // y = |v|, z = |v|
  if (py && pz) {
    // exponent legs have the analytic optimum y = |v|^{c/pY} with
    // 1/c = theta/pY + (1-theta)/pZ; start there and let the balance
    // iteration confirm it
    const double c = 1.0 / (theta / *py + (1.0 - theta) / *pz);
    for (std::size_t i = 0; i < k; ++i) w[i] = la[i] * (c / *py);
  }
  auto z_of = [&](const std::vector<double>& wy) {
    std::vector<double> lz(k);
    for (std::size_t i = 0; i < k; ++i) lz[i] = (la[i] - theta * wy[i]) / (1.0 - theta);
    return lz;
  };

  auto objective = [&](const std::vector<double>& wy, LogLeg& ly, LogLeg& lz) {
    ly = eval_log_leg(Y, data.support, wy, opt);
    lz = eval_log_leg(Z, data.support, z_of(wy), opt);
    return theta * ly.log_norm + (1.0 - theta) * lz.log_norm;
  };

  LogLeg ly, lz;
  double obj = objective(w, ly, lz);
  double best_obj = obj;
  LogLeg best_ly = ly, best_lz = lz;
  double alpha = 0.25;
  data.converged = false;

  for (int iter = 0; iter < opt.interp_max_iter; ++iter) {
    double resid = 0.0;
    for (std::size_t i = 0; i < k; ++i) resid = std::max(resid, std::fabs(ly.mu[i] - lz.mu[i]));
    if (resid < opt.interp_residual_tol) {
      data.converged = true;
      break;
    }
    std::vector<double> delta(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double a = std::max(ly.mu[i], 1e-300);
      const double b = std::max(lz.mu[i], 1e-300);
      delta[i] = std::clamp(std::log(b) - std::log(a), -30.0, 30.0);
    }
    bool accepted = false;
    for (int back = 0; back < 12; ++back) {
      std::vector<double> cand = w;
      for (std::size_t i = 0; i < k; ++i) cand[i] += alpha * delta[i];
      LogLeg cy, cz;
      const double cobj = objective(cand, cy, cz);
      if (cobj <= obj + 1e-15 * std::fabs(obj)) {
        w = std::move(cand);
        obj = cobj;
        ly = cy;
        lz = cz;
        accepted = true;
        if (obj < best_obj) {
          best_obj = obj;
          best_ly = ly;
          best_lz = lz;
        }
        alpha = std::min(alpha * 1.4, 2.0);
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // meased out at this precision
  }

  data.value = std::exp(best_obj);
  data.gy = best_ly.g;
  data.gz = best_lz.g;
  // dual certificate <f, |v|>, f = gy^theta gz^(1-theta), computed in logs
  double max_t = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(k, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < k; ++i) {
    if (data.gy[i] > 0.0 && data.gz[i] > 0.0) {
      terms[i] = theta * std::log(data.gy[i]) + (1.0 - theta) * std::log(data.gz[i]) + la[i];
      max_t = std::max(max_t, terms[i]);
    }
  }
  if (std::isfinite(max_t)) {
    double s = 0.0;
    for (double t : terms)
      if (std::isfinite(t)) s += std::exp(t - max_t);
    data.lower = std::exp(max_t + std::log(s));
  }
  data.gap = std::max(0.0, data.value - data.lower);
  data.exact = false;
  return data;
}

}  // namespace detail

inline NormResult norm_info(const Space& s, const FiniteVector& v, const NormOptions& opt) {
  const SpaceNode& n = s.node();
  if (v.is_zero()) return {0.0, 0.0, true};
  switch (n.kind) {
    case SpaceKind::lp:
      return {detail::lp_norm_value(n.p, v), 0.0, true};
    case SpaceKind::tsirelson:
      return {t_norm_value(v, n.ts), 0.0, true};
    case SpaceKind::convexify: {
      NormResult base = norm_info(n.a, v.pointwise_power(n.p), opt);
      NormResult r;
      r.value = std::pow(base.value, 1.0 / n.p);
      r.exact = base.exact;
      r.gap = base.exact ? 0.0
                         : r.value - std::pow(std::max(base.value - base.gap, 0.0), 1.0 / n.p);
      return r;
    }
    case SpaceKind::interpolate: {
      detail::InterpData d = detail::interpolate_factorize(n.a, n.b, n.theta, v.abs(), opt);
      return {d.value, d.gap, d.exact};
    }
    case SpaceKind::dual: {
      if (auto q = lp_exponent(s)) return {detail::lp_norm_value(*q, v), 0.0, true};
      DualNormResult d = dual_norm(n.a, v, opt);
      return {d.value, d.gap, d.exact};
    }
    case SpaceKind::direct_sum: {
      std::vector<FiniteVector> parts = detail::split_by_blocks(n, v);
      std::vector<Entry> norms;
      double gap_acc = 0.0;
      bool exact = true;
      for (std::size_t k = 0; k < parts.size(); ++k) {
        if (parts[k].is_zero()) continue;
        NormResult pr = norm_info(n.parts[k].space, parts[k], opt);
        norms.push_back({static_cast<Index>(k + 1), pr.value});
        gap_acc += pr.gap;
        exact = exact && pr.exact;
      }
      NormResult outer = norm_info(n.outer, FiniteVector::from_entries(std::move(norms)), opt);
      // coarse bracket: outer gap plus the summed part gaps
      return {outer.value, outer.gap + gap_acc, exact && outer.exact};
    }
  }
  throw std::logic_error("norm_info: unreachable");
}

namespace detail {

// Ascent state for sup{ <f, x> : ||x|| <= 1 }.  By 1-unconditionality the
// optimizer may restrict to sign(f) orthant vectors supported on supp(f).
struct DualAscent {
  const Space& space;
  const NormOptions& opt;
  std::vector<Index> support;
  std::vector<double> fabsv;

  double phi(const std::vector<double>& w, FiniteVector* out = nullptr) const {
    const double m = *std::max_element(w.begin(), w.end());
    std::vector<Entry> es;
    for (std::size_t i = 0; i < w.size(); ++i)
      es.push_back({support[i], std::exp(std::max(w[i] - m, -700.0))});
    FiniteVector u = FiniteVector::from_entries(std::move(es));
    const double nu = norm(space, u, opt);
    double num = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) num += fabsv[i] * u.at(support[i]);
    if (out) *out = u.scaled(1.0 / nu);
    return num / nu;
  }

  // entropic phase: step along the difference between the objective measure
  // and the norming measure, then optionally polish coordinatewise
  std::pair<double, bool> run(std::vector<double> w, FiniteVector* witness) const {
    double eta = 1.0;
    double value = phi(w);
    bool settled = false;
    for (int it = 0; it < opt.dual_entropic_iters; ++it) {
      const double m = *std::max_element(w.begin(), w.end());
      std::vector<Entry> es;
      for (std::size_t i = 0; i < w.size(); ++i)
        es.push_back({support[i], std::exp(std::max(w[i] - m, -700.0))});
      FiniteVector u = FiniteVector::from_entries(std::move(es));
      const double nu = norm(space, u, opt);
      FiniteVector g = norming_functional(space, u, opt).f.abs();
      double num = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) num += fabsv[i] * u.at(support[i]);

      double resid = 0.0;
      std::vector<double> delta(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) {
        const double ui = u.at(support[i]);
        const double mu_obj = fabsv[i] * ui / num;
        const double mu_nrm = g.at(support[i]) * ui / nu;
        delta[i] = mu_obj - mu_nrm;
        resid = std::max(resid, std::fabs(delta[i]));
      }
      if (resid < 1e-13) {
        settled = true;
        break;
      }
      bool accepted = false;
      for (int back = 0; back < 10; ++back) {
        std::vector<double> cand = w;
        for (std::size_t i = 0; i < w.size(); ++i)
          cand[i] += eta * delta[i] * static_cast<double>(w.size());
        const double cv = phi(cand);
        if (cv > value) {
          w = std::move(cand);
          value = cv;
          accepted = true;
          eta = std::min(eta * 1.3, 4.0);
          break;
        }
        eta *= 0.5;
      }
      if (!accepted) break;
    }
    if (!settled && opt.dual_polish) {
      AscentOptions aopt;
      aopt.max_sweeps = 40;
      aopt.step0 = 0.25;
      aopt.min_step = 1e-10;
      auto res = coordinate_maximize([&](const std::vector<double>& ww) { return phi(ww); }, w,
                                     aopt);
      value = res.value;
      settled = res.converged;
    }
    if (witness) value = phi(w, witness);
    return {value, settled};
  }
};

inline DualNormResult dual_norm_impl(const Space& s, const FiniteVector& f,
                                     const FiniteVector* hint, const NormOptions& opt) {
  const SpaceNode& n = s.node();
  DualNormResult out;
  if (f.is_zero()) {
    out.exact = true;
    return out;
  }

  if (auto q = lp_exponent(s)) {
    out.exact = true;
    if (*q == 1.0) {
      out.value = f.linf();
      for (const Entry& e : f.entries()) {
        if (std::fabs(e.value) == out.value) {
          out.witness = FiniteVector::of({{e.index, e.value < 0 ? -1.0 : 1.0}});
          break;
        }
      }
    } else if (std::isinf(*q)) {
      out.value = f.l1();
      std::vector<Entry> es;
      for (const Entry& e : f.entries()) es.push_back({e.index, e.value < 0 ? -1.0 : 1.0});
      out.witness = FiniteVector::from_entries(std::move(es));
    } else {
      const double qc = *q / (*q - 1.0);
      out.value = lp_norm_value(qc, f);
      std::vector<Entry> es;
      const double scale = std::pow(out.value, qc - 1.0);
      for (const Entry& e : f.entries()) {
        const double mag = std::pow(std::fabs(e.value), qc - 1.0) / scale;
        es.push_back({e.index, e.value < 0 ? -mag : mag});
      }
      out.witness = FiniteVector::from_entries(std::move(es));
    }
    return out;
  }

  if (n.kind == SpaceKind::dual) {
    // bidual of a finite-support vector: evaluate in the base space
    NormResult base = norm_info(n.a, f, opt);
    out.value = base.value;
    out.gap = base.gap;
    out.exact = base.exact;
    out.witness = norming_functional(n.a, f, opt).f;
    return out;
  }

  DualAscent ascent{s, opt, f.support(), {}, };
  for (const Entry& e : f.entries()) ascent.fabsv.push_back(std::fabs(e.value));
  const std::size_t k = ascent.support.size();

  double best = -1.0, worst = std::numeric_limits<double>::infinity();
  FiniteVector best_witness;
  bool all_settled = true;

  auto consider = [&](std::vector<double> w0) {
    FiniteVector wit;
    auto [value, settled] = ascent.run(std::move(w0), &wit);
    all_settled = all_settled && settled;
    if (value > best) {
      best = value;
      best_witness = wit;
    }
    worst = std::min(worst, value);
  };

  for (int r = 0; r < opt.dual_restarts; ++r) {
    std::vector<double> w0(k);
    if (r == 0) {
      for (std::size_t i = 0; i < k; ++i) w0[i] = std::log(ascent.fabsv[i]);
    } else {
      Rng rng = Rng::derive(opt.dual_seed, static_cast<std::uint64_t>(r));
      for (std::size_t i = 0; i < k; ++i) w0[i] = std::log(rng.exponential());
    }
    consider(std::move(w0));
  }
  if (hint && !hint->is_zero()) {
    std::vector<double> w0(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double h = std::fabs(hint->at(ascent.support[i]));
      w0[i] = std::log(std::max(h, 1e-12));
    }
    consider(std::move(w0));
  }

  // orient the witness along sign(f)
  out.witness = best_witness.with_signs_of(f);
  out.value = dot(f, out.witness);
  out.gap = best - worst;
  out.exact = false;
  out.converged = all_settled;
  return out;
}

}  // namespace detail

inline DualNormResult dual_norm(const Space& s, const FiniteVector& f, const NormOptions& opt) {
  return detail::dual_norm_impl(s, f, nullptr, opt);
}

inline DualNormResult dual_norm_with_hint(const Space& s, const FiniteVector& f,
                                          const FiniteVector& hint, const NormOptions& opt) {
  return detail::dual_norm_impl(s, f, &hint, opt);
}

// One norming functional of v: <f, v> = ||v|| with ||f||_* = 1, within the
// tolerance tier of the construction path.  Non-smooth norms yield one
// subgradient: the Tsirelson certificate pick, or the sign/argmax pattern
// for l1 and sup norms (first maximal coordinate wins).
inline NormingFunctional norming_functional(const Space& s, const FiniteVector& v,
                                            const NormOptions& opt) {
  if (v.is_zero()) throw std::invalid_argument("norming_functional: zero vector");
  const SpaceNode& n = s.node();
  NormingFunctional out;
  switch (n.kind) {
    case SpaceKind::lp: {
      if (std::isinf(n.p)) {
        const double m = v.linf();
        for (const Entry& e : v.entries()) {
          if (std::fabs(e.value) == m) {
            out.f = FiniteVector::of({{e.index, e.value < 0 ? -1.0 : 1.0}});
            break;
          }
        }
      } else if (n.p == 1.0) {
        std::vector<Entry> es;
        for (const Entry& e : v.entries()) es.push_back({e.index, e.value < 0 ? -1.0 : 1.0});
        out.f = FiniteVector::from_entries(std::move(es));
      } else {
        const double nv = detail::lp_norm_value(n.p, v);
        const double scale = std::pow(nv, n.p - 1.0);
        std::vector<Entry> es;
        for (const Entry& e : v.entries()) {
          const double mag = std::pow(std::fabs(e.value), n.p - 1.0) / scale;
          es.push_back({e.index, e.value < 0 ? -mag : mag});
        }
        out.f = FiniteVector::from_entries(std::move(es));
      }
      break;
    }
    case SpaceKind::tsirelson:
      out.f = t_norming_functional(v, n.ts);
      break;
    case SpaceKind::convexify: {
      // chain rule through u = |v|^p
      FiniteVector u = v.pointwise_power(n.p);
      FiniteVector g = norming_functional(n.a, u, opt).f.abs();
      const double nv = norm_info(s, v, opt).value;
      const double scale = std::pow(nv, n.p - 1.0);
      std::vector<Entry> es;
      for (const Entry& e : v.entries()) {
        const double gi = g.at(e.index);
        if (gi == 0.0) continue;
        const double mag = gi * std::pow(std::fabs(e.value), n.p - 1.0) / scale;
        es.push_back({e.index, e.value < 0 ? -mag : mag});
      }
      out.f = FiniteVector::from_entries(std::move(es));
      break;
    }
    case SpaceKind::interpolate: {
      detail::InterpData d =
          detail::interpolate_factorize(n.a, n.b, n.theta, v.abs(), opt);
      std::vector<Entry> es;
      for (std::size_t i = 0; i < d.support.size(); ++i) {
        if (d.gy[i] <= 0.0 || d.gz[i] <= 0.0) continue;
        const double mag = std::pow(d.gy[i], n.theta) * std::pow(d.gz[i], 1.0 - n.theta);
        const double sign = v.at(d.support[i]) < 0 ? -1.0 : 1.0;
        es.push_back({d.support[i], sign * mag});
      }
      out.f = FiniteVector::from_entries(std::move(es));
      break;
    }
    case SpaceKind::dual: {
      if (auto q = lp_exponent(s)) {
        Space reduced = Space::lp(*q);
        return norming_functional(reduced, v, opt);
      }
      out.f = dual_norm(n.a, v, opt).witness;
      break;
    }
    case SpaceKind::direct_sum: {
      std::vector<FiniteVector> parts = detail::split_by_blocks(n, v);
      std::vector<Entry> norms;
      std::vector<std::size_t> live;
      for (std::size_t k = 0; k < parts.size(); ++k) {
        if (parts[k].is_zero()) continue;
        norms.push_back({static_cast<Index>(k + 1), norm(n.parts[k].space, parts[k], opt)});
        live.push_back(k);
      }
      FiniteVector pn = FiniteVector::from_entries(std::move(norms));
      FiniteVector h = norming_functional(n.outer, pn, opt).f.abs();
      FiniteVector acc;
      for (std::size_t j = 0; j < live.size(); ++j) {
        const std::size_t k = live[j];
        const double hk = h.at(static_cast<Index>(k + 1));
        if (hk == 0.0) continue;
        acc = acc + norming_functional(n.parts[k].space, parts[k], opt).f.scaled(hk);
      }
      out.f = acc;
      break;
    }
  }
  out.attained = dot(out.f, v);
  return out;
}

}  // namespace latlab
