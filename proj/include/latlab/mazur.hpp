// Extremal geometric-mean vectors and the ball maps built from them.
//
// For a weight vector b (nonnegative, summing to one) and a 1-unconditional
// space X, solve_F maximizes  G(b, x) = prod x_i^{b_i}  over the unit sphere.
// The maximizer F_X(b) shares the support of b and its coordinate ratios
// b_i / x_i form a norming functional of x, which is both the fixed-point
// iteration used here and the optimality certificate reported back.
//
// Solver: a damped fixed-point iteration x <- normalize(b / f(x)) in
// log-coordinates, falling back to a cutting-plane scheme when the iteration
// stalls on a non-smooth sphere: supporting functionals collected from the
// norming-functional oracle bound the ball by an outer polytope, the
// restricted problem is solved exactly through its smooth dual, and new cuts
// are queried at infeasible optimizers until the iterate is (1+tol)-feasible.
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "latlab/core.hpp"
#include "latlab/optimize.hpp"
#include "latlab/space.hpp"

namespace latlab {

class WeightVector {
 public:
  // validates: nonnegative coordinates, total mass 1 within 1e-12
  static WeightVector checked(FiniteVector b) {
    for (const Entry& e : b.entries())
      if (e.value < 0.0) throw std::invalid_argument("WeightVector: negative coordinate");
    if (b.is_zero() || std::fabs(b.sum() - 1.0) > 1e-12)
      throw std::invalid_argument("WeightVector: coordinates must sum to 1");
    return WeightVector(std::move(b));
  }

  // convenience: |v| rescaled to total mass 1
  static WeightVector normalized(const FiniteVector& v) {
    if (v.is_zero()) throw std::invalid_argument("WeightVector: zero vector");
    FiniteVector a = v.abs();
    return WeightVector(a.scaled(1.0 / a.sum()));
  }

  const FiniteVector& vec() const { return b_; }

 private:
  explicit WeightVector(FiniteVector b) : b_(std::move(b)) {}
  FiniteVector b_;
};

// G_X(b, x) = prod_{i in supp(b)} x_i^{b_i}, computed as exp(sum b_i log x_i);
// zero when some x_i vanishes where b_i > 0.
inline double geometric_mean(const WeightVector& b, const FiniteVector& x) {
  double acc = 0.0;
  for (const Entry& e : b.vec().entries()) {
    const double xi = x.at(e.index);
    if (xi < 0.0) throw std::invalid_argument("geometric_mean: negative coordinate on supp(b)");
    if (xi == 0.0) return 0.0;
    acc += e.value * std::log(xi);
  }
  return std::exp(acc);
}

struct SolveOptions {
  double damping = 0.5;             // log-space blend toward the fixed-point target
  int max_iterations = 10000;       // fixed-point budget
  double fixed_point_tol = 5e-11;   // residual max|x_i f_i - b_i| declaring success
  int max_cuts = 500;               // cutting-plane budget
  double cut_feasibility_tol = 1e-13;  // accept when | ||x_cut|| - 1 | <= tol
  double kkt_tol = 1e-6;
  bool dual_check = true;           // certify optimality through the dual norm
  NormOptions norm_opts;
  // optional strictly positive starting point with the support of b
  std::optional<FiniteVector> initial;
};

struct MazurSolution {
  FiniteVector x;          // unit-sphere maximizer, support of b
  FiniteVector f;          // ratio functional b_i / x_i
  double value = 0.0;      // G_X(b, x)
  double attained = 0.0;   // <f, x>
  double kkt_residual = 0.0;
  bool converged = false;
  int iterations = 0;
  int cuts_used = 0;
  std::string method;
};

namespace detail {

inline double sphere_objective(const FiniteVector& b, const FiniteVector& x) {
  double acc = 0.0;
  for (const Entry& e : b.entries()) acc += e.value * std::log(x.at(e.index));
  return acc;
}

}  // namespace detail

inline MazurSolution solve_F(const Space& space, const WeightVector& wb,
                             const SolveOptions& opt = {}) {
  const FiniteVector& b = wb.vec();
  const std::vector<Index> coords = b.support();
  const std::size_t k = coords.size();
  std::vector<double> bv(k);
  for (std::size_t i = 0; i < k; ++i) bv[i] = b.at(coords[i]);

  MazurSolution sol;
  sol.method = "fixed-point";

  auto normalize = [&](const FiniteVector& v) {
    return v.scaled(1.0 / norm(space, v, opt.norm_opts));
  };

  FiniteVector x;
  if (opt.initial) {
    if (!opt.initial->same_support(b))
      throw std::invalid_argument("solve_F: initial point must share the support of b");
    x = normalize(opt.initial->abs());
  } else {
    x = normalize(b);
  }
  double obj = detail::sphere_objective(b, x);
  double alpha = opt.damping;
  double alpha_cap = opt.damping;
  bool need_cuts = false;
  bool fixed_point_done = false;
  double best_residual = std::numeric_limits<double>::infinity();
  int best_residual_iter = 0;
  std::vector<std::vector<double>> collected_cuts;

  auto cut_row = [&](const FiniteVector& g) {
    std::vector<double> row(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) row[i] = std::fabs(g.at(coords[i]));
    return row;
  };

  for (int it = 0; it < opt.max_iterations; ++it) {
    sol.iterations = it + 1;
    FiniteVector g = norming_functional(space, x, opt.norm_opts).f.abs();
    collected_cuts.push_back(cut_row(g));
    if (collected_cuts.size() > 12) collected_cuts.erase(collected_cuts.begin());

    double residual = 0.0;
    bool degenerate = false;
    for (std::size_t i = 0; i < k; ++i) {
      const double gi = g.at(coords[i]);
      // subgradients of kinked norms skip coordinates outright; smooth
      // oracles always return strictly positive values on the support
      if (gi <= 1e-300) {
        degenerate = true;
        break;
      }
      // relative stationarity so that coordinates with tiny weights are
      // held to the same accuracy
      residual = std::max(residual, std::fabs(x.at(coords[i]) * gi / bv[i] - 1.0));
    }
    if (degenerate) {  // subgradient vanished on the support: kink ahead
      need_cuts = true;
      break;
    }
    if (residual <= opt.fixed_point_tol) {
      fixed_point_done = true;
      break;
    }
    if (residual < 0.995 * best_residual) {
      best_residual = residual;
      best_residual_iter = it;
    } else if (it - best_residual_iter > 12) {
      // no progress at this damping: either the map is not contracting yet
      // (slope 1 - alpha*p in the smooth case) or the sphere has a kink;
      // shrink the step and only fall back to cuts once that bottoms out
      alpha *= 0.5;
      alpha_cap = alpha;
      best_residual_iter = it;
      if (alpha < 1e-3) {
        need_cuts = true;
        break;
      }
    }

    // damped step in log-coordinates toward normalize(b / g)
    std::vector<Entry> prop;
    prop.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double lx = std::log(x.at(coords[i]));
      const double lt = std::log(bv[i]) - std::log(g.at(coords[i]));
      prop.push_back({coords[i], std::exp((1.0 - alpha) * lx + alpha * lt)});
    }
    FiniteVector cand = normalize(FiniteVector::from_entries(std::move(prop)));
    const double cobj = detail::sphere_objective(b, cand);
    if (cobj < obj - 1e-13 * std::max(1.0, std::fabs(obj))) {
      alpha *= 0.5;
      if (alpha < 1e-3) {
        need_cuts = true;
        break;
      }
      continue;
    }
    x = std::move(cand);
    obj = cobj;
    alpha = std::min(alpha * 1.15, alpha_cap);
  }

  if (!fixed_point_done && !need_cuts) need_cuts = true;  // budget exhausted; try cuts

  if (need_cuts) {
    sol.method = "fixed-point+cuts";
    std::vector<std::vector<double>> cuts;
    // axis cuts guarantee coverage and a bounded polytope
    for (std::size_t i = 0; i < k; ++i) {
      std::vector<double> row(k, 0.0);
      row[i] = 1.0 / norm(space, FiniteVector::unit(coords[i]), opt.norm_opts);
      cuts.push_back(std::move(row));
    }
    for (auto& row : collected_cuts) cuts.push_back(std::move(row));

    auto near_duplicate = [&](const std::vector<double>& row) {
      for (const auto& c : cuts) {
        double dev = 0.0;
        for (std::size_t i = 0; i < k; ++i) dev = std::max(dev, std::fabs(c[i] - row[i]));
        if (dev <= 1e-13) return true;
      }
      return false;
    };

    std::vector<double> warm;
    double best_feas = std::numeric_limits<double>::infinity();
    FiniteVector best_x = x;
    int since_improve = 0;
    for (int round = 0; round < opt.max_cuts; ++round) {
      sol.cuts_used = round + 1;
      auto cut_sol = detail::maximize_geometric_mean_over_cuts(
          bv, cuts, warm.empty() ? nullptr : &warm);
      std::vector<Entry> es;
      for (std::size_t i = 0; i < k; ++i) es.push_back({coords[i], cut_sol.x[i]});
      FiniteVector xc = FiniteVector::from_entries(std::move(es));
      const double nx = norm(space, xc, opt.norm_opts);
      x = xc.scaled(1.0 / nx);
      const double feas = std::fabs(nx - 1.0);
      if (cut_sol.converged && feas < best_feas) {
        best_feas = feas;
        best_x = x;
        since_improve = 0;
      } else if (++since_improve >= 12) {
        break;  // bottomed out at the evaluation noise floor
      }
      if (cut_sol.converged && feas <= opt.cut_feasibility_tol) break;
      std::vector<double> row = cut_row(norming_functional(space, x, opt.norm_opts).f);
      if (!near_duplicate(row)) cuts.push_back(std::move(row));
      // keep the working set small: axis rows, rows active in the last
      // solve, and the most recent queries
      if (cuts.size() > 3 * k + 24) {
        std::vector<std::vector<double>> kept(cuts.begin(), cuts.begin() + static_cast<long>(k));
        for (std::size_t j = k; j < cuts.size(); ++j) {
          const bool active = j < cut_sol.lambda.size() && cut_sol.lambda[j] > 1e-14;
          if (active || j + 16 >= cuts.size()) kept.push_back(cuts[j]);
        }
        cuts = std::move(kept);
        warm.clear();
      } else {
        warm = cut_sol.lambda;
      }
    }
    x = best_x;
    fixed_point_done = best_feas <= 1e-9;

    // Endgame polish.  Cutting planes reach only square-root accuracy on
    // curved facets, so coordinates sitting on their (flat) axis facets are
    // frozen and the damped ratio iteration runs on the free block, with a
    // scalar rescale keeping the iterate on the sphere.  The polished point
    // is kept only when it improves the objective.
    std::vector<double> axis_norm(k);
    for (std::size_t i = 0; i < k; ++i)
      axis_norm[i] = norm(space, FiniteVector::unit(coords[i]), opt.norm_opts);
    std::vector<bool> pinned(k, false);
    std::size_t nfree = 0;
    for (std::size_t i = 0; i < k; ++i) {
      pinned[i] = x.at(coords[i]) >= (1.0 - 1e-3) * axis_norm[i];
      if (!pinned[i]) ++nfree;
    }
    const bool any_pin = nfree < k;
    if (any_pin) {
      auto assemble = [&](const std::vector<double>& freev, double s) {
        std::vector<Entry> es;
        std::size_t fi = 0;
        for (std::size_t i = 0; i < k; ++i) {
          if (pinned[i]) es.push_back({coords[i], axis_norm[i]});
          else es.push_back({coords[i], s * freev[fi++]});
        }
        return FiniteVector::from_entries(std::move(es));
      };
      auto rescaled = [&](const std::vector<double>& freev) {
        // largest s with ||(pins, s*free)|| <= 1 (the norm may be flat in s)
        double lo = 0.0, hi = 1.0;
        while (norm(space, assemble(freev, hi), opt.norm_opts) <= 1.0 && hi < 1e6) hi *= 2.0;
        for (int step = 0; step < 80; ++step) {
          const double mid = 0.5 * (lo + hi);
          if (norm(space, assemble(freev, mid), opt.norm_opts) <= 1.0) lo = mid;
          else hi = mid;
        }
        return assemble(freev, lo);
      };

      std::vector<double> freev;
      for (std::size_t i = 0; i < k; ++i)
        if (!pinned[i]) freev.push_back(std::max(x.at(coords[i]), 1e-12));
      FiniteVector cand = nfree == 0 ? assemble(freev, 1.0) : rescaled(freev);
      if (nfree > 0) {
        double beta = 0.5;
        double pobj = detail::sphere_objective(b, cand);
        for (int it = 0; it < 200; ++it) {
          // query the functional with pins nudged inward: at the optimum the
          // sup term ties the active family facet and the certificate would
          // otherwise return a leaf with no information on the free block
          std::vector<Entry> qes;
          for (const Entry& e : cand.entries()) {
            bool is_pin = false;
            for (std::size_t i = 0; i < k; ++i)
              if (coords[i] == e.index && pinned[i]) is_pin = true;
            qes.push_back({e.index, is_pin ? e.value * (1.0 - 1e-9) : e.value});
          }
          FiniteVector query = FiniteVector::from_entries(std::move(qes));
          FiniteVector g = norming_functional(space, query, opt.norm_opts).f.abs();
          bool usable = true;
          std::vector<double> next = freev;
          std::size_t fi = 0;
          for (std::size_t i = 0; i < k; ++i) {
            if (pinned[i]) continue;
            const double gi = g.at(coords[i]);
            if (gi <= 1e-300) {
              usable = false;
              break;
            }
            const double lt = std::log(bv[i]) - std::log(gi);
            next[fi] = std::exp((1.0 - beta) * std::log(freev[fi]) + beta * lt);
            ++fi;
          }
          if (!usable) break;
          FiniteVector cnext = rescaled(next);
          const double cobj = detail::sphere_objective(b, cnext);
          if (cobj < pobj - 1e-13 * std::max(1.0, std::fabs(pobj))) {
            beta *= 0.5;
            if (beta < 1e-3) break;
            continue;
          }
          freev = std::move(next);
          cand = std::move(cnext);
          if (cobj - pobj <= 1e-15 * std::max(1.0, std::fabs(cobj)) && it > 4) {
            pobj = cobj;
            break;
          }
          pobj = cobj;
        }
      }
      if (detail::sphere_objective(b, cand) >= detail::sphere_objective(b, x)) {
        x = cand;
        fixed_point_done = true;
      }
    }
  }

  // assemble the certificate data
  std::vector<Entry> fes;
  for (std::size_t i = 0; i < k; ++i) fes.push_back({coords[i], bv[i] / x.at(coords[i])});
  sol.x = x;
  sol.f = FiniteVector::from_entries(std::move(fes));
  sol.value = geometric_mean(wb, x);
  sol.attained = dot(sol.f, sol.x);

  double residual = std::fabs(norm(space, sol.x, opt.norm_opts) - 1.0);
  residual = std::max(residual, std::fabs(sol.attained - 1.0));
  if (opt.dual_check) {
    DualNormResult dn = dual_norm_with_hint(space, sol.f, sol.x, opt.norm_opts);
    residual = std::max(residual, std::fabs(dn.value - 1.0));
    sol.kkt_residual = residual;
    sol.converged = residual <= opt.kkt_tol;
  } else {
    sol.kkt_residual = residual;
    sol.converged = fixed_point_done && residual <= opt.kkt_tol;
  }
  return sol;
}

// ---- ball maps ----

enum class MapDirection { from_l1, to_l1 };

struct BallMap {
  Space source, target;
  std::function<FiniteVector(const FiniteVector&)> eval;
  std::string label;

  FiniteVector operator()(const FiniteVector& v) const { return eval(v); }
};

// Homogeneous, sign-equivariant extension of the extremal-vector map between
// the unit balls of l1 and `space` (from_l1), and its ratio-functional
// inverse direction (to_l1).
inline BallMap extend_map(const Space& space, MapDirection direction,
                          const SolveOptions& opt = {}) {
  BallMap map;
  if (direction == MapDirection::from_l1) {
    map.source = Space::lp(1);
    map.target = space;
    map.label = "F[l1->" + space.to_string() + "]";
    map.eval = [space, opt](const FiniteVector& v) -> FiniteVector {
      if (v.is_zero()) return {};
      const double r = v.l1();
      MazurSolution sol = solve_F(space, WeightVector::normalized(v), opt);
      return sol.x.scaled(r).with_signs_of(v);
    };
  } else {
    map.source = space;
    map.target = Space::lp(1);
    map.label = "F[" + space.to_string() + "->l1]";
    map.eval = [space, opt](const FiniteVector& v) -> FiniteVector {
      if (v.is_zero()) return {};
      const double r = norm(space, v, opt.norm_opts);
      FiniteVector u = v.abs().scaled(1.0 / r);
      FiniteVector f = norming_functional(space, u, opt.norm_opts).f.abs();
      return hadamard(u, f).scaled(r).with_signs_of(v);
    };
  }
  return map;
}

// F_{X,Y}: through the l1 ball, to_l1 on X then from_l1 into Y.
inline BallMap compose_map(const Space& X, const Space& Y, const SolveOptions& opt = {}) {
  BallMap to = extend_map(X, MapDirection::to_l1, opt);
  BallMap from = extend_map(Y, MapDirection::from_l1, opt);
  BallMap map;
  map.source = X;
  map.target = Y;
  map.label = "F[" + X.to_string() + "->" + Y.to_string() + "]";
  map.eval = [to, from](const FiniteVector& v) { return from.eval(to.eval(v)); };
  return map;
}

// Normalized block coupling for direct sums: each block is mapped by its own
// norm-preserving map and the result is rescaled to match the source norm.
inline BallMap coupled_map(const Space& source, const Space& target,
                           std::vector<BallMap> block_maps, const NormOptions& nopt = {}) {
  const SpaceNode& sn = source.node();
  const SpaceNode& tn = target.node();
  if (sn.kind != SpaceKind::direct_sum || tn.kind != SpaceKind::direct_sum)
    throw std::invalid_argument("coupled_map: both spaces must be direct sums");
  if (sn.parts.size() != tn.parts.size() || sn.parts.size() != block_maps.size())
    throw std::invalid_argument("coupled_map: part count mismatch");
  for (std::size_t i = 0; i < sn.parts.size(); ++i)
    if (sn.parts[i].lo != tn.parts[i].lo || sn.parts[i].hi != tn.parts[i].hi)
      throw std::invalid_argument("coupled_map: block ranges must coincide");

  BallMap map;
  map.source = source;
  map.target = target;
  map.label = "coupled[" + source.to_string() + "->" + target.to_string() + "]";
  auto blocks = std::make_shared<std::vector<BallMap>>(std::move(block_maps));
  map.eval = [source, target, blocks, nopt](const FiniteVector& v) -> FiniteVector {
    if (v.is_zero()) return {};
    const SpaceNode& n = source.node();
    FiniteVector image;
    for (std::size_t i = 0; i < n.parts.size(); ++i) {
      FiniteVector part = v.restricted_to_range(n.parts[i].lo, n.parts[i].hi);
      if (part.is_zero()) continue;
      image = image + (*blocks)[i].eval(part);
    }
    const double nv = norm(source, v, nopt);
    const double ni = norm(target, image, nopt);
    if (ni == 0.0) return {};
    return image.scaled(nv / ni);
  };
  return map;
}

// ---- identity checks from the interpolation calculus ----

struct FactorizationCheck {
  FiniteVector lhs, rhs;
  double max_dev = 0.0;
  bool lhs_converged = true, rhs_converged = true;
};

// F over the Calderon product versus the coordinatewise product of powered
// leg solutions.
inline FactorizationCheck verify_lemma42(const Space& Y, const Space& Z, double theta,
                                         const WeightVector& b, const SolveOptions& opt = {}) {
  FactorizationCheck out;
  MazurSolution inter = solve_F(Space::interpolate(Y, Z, theta), b, opt);
  MazurSolution fy = solve_F(Y, b, opt);
  MazurSolution fz = solve_F(Z, b, opt);
  out.lhs = inter.x;
  out.rhs = hadamard(fy.x.pointwise_power(theta), fz.x.pointwise_power(1.0 - theta));
  out.max_dev = max_abs_dev(out.lhs, out.rhs);
  out.lhs_converged = inter.converged;
  out.rhs_converged = fy.converged && fz.converged;
  return out;
}

// F over the p-convexification versus the powered base solution (p = 1/theta).
inline FactorizationCheck verify_cor43(const Space& X, double theta, const WeightVector& b,
                                       const SolveOptions& opt = {}) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("verify_cor43: theta must lie in (0,1)");
  FactorizationCheck out;
  MazurSolution conv = solve_F(Space::convexify(X, 1.0 / theta), b, opt);
  MazurSolution base = solve_F(X, b, opt);
  out.lhs = conv.x;
  out.rhs = base.x.pointwise_power(theta);
  out.max_dev = max_abs_dev(out.lhs, out.rhs);
  out.lhs_converged = conv.converged;
  out.rhs_converged = base.converged;
  return out;
}

// ---- the p-convex / r-concave factor decomposition ----

struct FactorDecomposition {
  double theta = 0.0;
  Space factor;        // the Y making X = lp(p)^theta Y^(1-theta)
  bool degenerate = false;  // theta in {0,1}
};

// theta = 2p/r - 1 and the dual/power recipe for Y.  Preconditions: the
// caller declares X p-convex and r-concave with constant one and p <= r <= 2p
// (checked arithmetically here, statistically by the caller if desired).
inline FactorDecomposition construct_lemma44(double p, double r, const Space& X) {
  if (!(p >= 1.0)) throw std::invalid_argument("construct_lemma44: p must be >= 1");
  if (!(r >= p && r <= 2.0 * p))
    throw std::invalid_argument("construct_lemma44: need p <= r <= 2p");
  FactorDecomposition out;
  out.theta = 2.0 * p / r - 1.0;
  if (r == p) {  // interpolation degenerates to lp(p) itself
    out.degenerate = true;
    out.factor = Space::lp(2.0 * p);
    return out;
  }
  if (r == 2.0 * p) {  // theta = 0: X itself is the factor
    out.degenerate = true;
    out.factor = X;
    return out;
  }
  // reduce to the 1-convex case, split off the square-function factor by
  // duality, then convexify back
  Space W = (p == 1.0) ? X : Space::concavify(X, 1.0 / p);
  const double rp = r / p;
  const double cpow = 2.0 - 2.0 / rp;  // = 2/(r/p)'
  Space dualW = Space::dual_of(W);
  Space inner = (cpow == 1.0) ? Space::convexify(dualW, 1.0) : Space::concavify(dualW, cpow);
  Space Z = Space::dual_of(inner);
  out.factor = (p == 1.0) ? Z : Space::convexify(Z, p);
  return out;
}

// ---- explicit modulus terms ----

struct ModulusBound {
  double leading = 0.0;           // the explicit epsilon-power term
  double phi0_coefficient = 0.0;  // coefficient of the unspecified remainder
};

enum class ModulusDirection { forward, inverse };

// Leading term of the continuity-modulus bounds for the ball maps between
// lp(p) and a p-convex r-concave space: 2*eps^{2p/r-1} forward, 2*eps for the
// inverse map; the remainder coefficient (1-p/r), resp. (1-p/r)^{1/p},
// multiplies a modulus depending only on p that has no explicit form.
inline ModulusBound modulus_bound_45_46(double p, double r, double eps, ModulusDirection which) {
  if (!(p >= 1.0 && r >= p && r <= 2.0 * p))
    throw std::invalid_argument("modulus_bound_45_46: need 1 <= p <= r <= 2p");
  if (!(eps > 0.0 && eps <= 2.0))
    throw std::invalid_argument("modulus_bound_45_46: eps must lie in (0, 2]");
  ModulusBound out;
  if (which == ModulusDirection::forward) {
    out.leading = 2.0 * std::pow(eps, 2.0 * p / r - 1.0);
    out.phi0_coefficient = 1.0 - p / r;
  } else {
    out.leading = 2.0 * eps;
    out.phi0_coefficient = std::pow(1.0 - p / r, 1.0 / p);
  }
  return out;
}

}  // namespace latlab
