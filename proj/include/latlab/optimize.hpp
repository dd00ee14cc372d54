// Internal optimization helpers for the norm oracles: a small dense SPD
// solve, derivative-free coordinate ascent in log-coordinates, and the
// geometric-mean-over-cut-polytope subproblem used by the extremal-vector
// solver.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

namespace latlab::detail {

// In-place Cholesky solve of A x = rhs for symmetric positive definite A
// (a relative ridge is added by callers as needed).  Returns false when a
// pivot degenerates.
inline bool solve_spd(std::vector<std::vector<double>> A, std::vector<double> rhs,
                      std::vector<double>& out) {
  const std::size_t n = A.size();
  for (std::size_t j = 0; j < n; ++j) {
    double d = A[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= A[j][k] * A[j][k];
    if (!(d > 0.0)) return false;
    A[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = A[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= A[i][k] * A[j][k];
      A[i][j] = s / A[j][j];
    }
  }
  // forward then backward substitution
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[i];
    for (std::size_t k = 0; k < i; ++k) s -= A[i][k] * rhs[k];
    rhs[i] = s / A[i][i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = rhs[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= A[k][ii] * rhs[k];
    rhs[ii] = s / A[ii][ii];
  }
  out = std::move(rhs);
  return true;
}

struct AscentOptions {
  int max_sweeps = 160;
  double step0 = 0.7;
  double min_step = 1e-12;
};

struct AscentResult {
  double value = -std::numeric_limits<double>::infinity();
  bool converged = false;
  int sweeps = 0;
};

// Maximize value_of(w) by per-coordinate steps with a shrinking step size.
// Steps repeat along an improving direction, so each sweep performs a crude
// line search per coordinate.
template <class F>
AscentResult coordinate_maximize(F&& value_of, std::vector<double>& w,
                                 const AscentOptions& opt = {}) {
  AscentResult res;
  res.value = value_of(w);
  double step = opt.step0;
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    res.sweeps = sweep + 1;
    bool improved = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (double dir : {1.0, -1.0}) {
        int run = 0;
        while (run++ < 50) {
          w[i] += dir * step;
          const double cand = value_of(w);
          if (cand > res.value) {
            res.value = cand;
            improved = true;
          } else {
            w[i] -= dir * step;
            break;
          }
        }
      }
    }
    if (!improved) {
      step *= 0.5;
      if (step < opt.min_step) {
        res.converged = true;
        break;
      }
    }
  }
  return res;
}

struct CutSolveResult {
  std::vector<double> x;       // maximizer of sum b_i log x_i over the cut polytope
  std::vector<double> lambda;  // multipliers, one per cut
  double objective = 0.0;      // sum b_i log x_i at the maximizer
  bool converged = false;
};

// Maximize sum_i b_i log x_i over { x > 0 : <c_j, x> <= 1 } for nonnegative
// cut vectors c_j whose union of supports covers supp(b).  Solved through the
// smooth convex dual  g(l) = -sum_i b_i log((C^T l)_i) + sum_j l_j  with a
// projected Newton iteration (gradient fallback, capped directions); the
// primal recovers as x = b / (C^T l).  `warm` optionally restarts from a
// multiplier vector of matching or shorter length.
inline CutSolveResult maximize_geometric_mean_over_cuts(
    const std::vector<double>& b, const std::vector<std::vector<double>>& cuts,
    const std::vector<double>* warm = nullptr, int max_iter = 250, double tol = 1e-12) {
  const std::size_t n = b.size();
  const std::size_t m = cuts.size();
  CutSolveResult out;
  out.lambda.assign(m, 1.0 / static_cast<double>(m));
  if (warm != nullptr && warm->size() <= m) {
    for (std::size_t j = 0; j < warm->size(); ++j)
      out.lambda[j] = std::max((*warm)[j], 0.0) + 1.0 / static_cast<double>(m * m);
  }

  auto field = [&](const std::vector<double>& l, std::vector<double>& f) {
    f.assign(n, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      if (l[j] == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) f[i] += l[j] * cuts[j][i];
    }
  };
  auto dual_value = [&](const std::vector<double>& l) {
    std::vector<double> f;
    field(l, f);
    double g = 0.0;
    for (std::size_t j = 0; j < m; ++j) g += l[j];
    for (std::size_t i = 0; i < n; ++i) {
      if (b[i] == 0.0) continue;
      if (!(f[i] > 0.0)) return std::numeric_limits<double>::infinity();
      g -= b[i] * std::log(f[i]);
    }
    return g;
  };

  std::vector<double> f, grad(m);
  double g_cur = dual_value(out.lambda);
  double pg = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iter; ++iter) {
    field(out.lambda, f);
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (b[i] != 0.0) s += b[i] * cuts[j][i] / f[i];
      grad[j] = 1.0 - s;
    }

    // projected-gradient stationarity
    pg = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double gj = (out.lambda[j] > 0.0) ? grad[j] : std::min(grad[j], 0.0);
      pg = std::max(pg, std::fabs(gj));
    }
    if (pg <= tol) {
      out.converged = true;
      break;
    }

    std::vector<std::size_t> free;
    for (std::size_t j = 0; j < m; ++j)
      if (out.lambda[j] > 1e-14 || grad[j] < -1e-14) free.push_back(j);
    if (free.empty()) {
      out.converged = true;
      break;
    }

    std::vector<std::vector<double>> H(free.size(), std::vector<double>(free.size(), 0.0));
    for (std::size_t a = 0; a < free.size(); ++a) {
      for (std::size_t c = a; c < free.size(); ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (b[i] == 0.0) continue;
          s += b[i] * cuts[free[a]][i] * cuts[free[c]][i] / (f[i] * f[i]);
        }
        H[a][c] = H[c][a] = s;
      }
    }
    double trace = 0.0;
    for (std::size_t a = 0; a < free.size(); ++a) trace += H[a][a];
    const double ridge = std::max(1e-13, 1e-9 * trace / static_cast<double>(free.size()));
    for (std::size_t a = 0; a < free.size(); ++a) H[a][a] += ridge;

    std::vector<double> rhs(free.size()), dir;
    for (std::size_t a = 0; a < free.size(); ++a) rhs[a] = -grad[free[a]];
    if (!solve_spd(H, rhs, dir)) dir = rhs;  // gradient fallback

    // cap the step so backtracking reaches useful scales even when the
    // reduced Hessian is nearly singular
    double lmax = 1.0;
    for (double l : out.lambda) lmax = std::max(lmax, l);
    double dmax = 0.0;
    for (double d : dir) dmax = std::max(dmax, std::fabs(d));
    if (dmax > 16.0 * lmax)
      for (double& d : dir) d *= 16.0 * lmax / dmax;

    double t = 1.0;
    bool stepped = false;
    for (int back = 0; back < 60 && !stepped; ++back) {
      std::vector<double> cand = out.lambda;
      for (std::size_t a = 0; a < free.size(); ++a)
        cand[free[a]] = std::max(0.0, cand[free[a]] + t * dir[a]);
      const double g_cand = dual_value(cand);
      if (g_cand < g_cur) {
        out.lambda = std::move(cand);
        g_cur = g_cand;
        stepped = true;
      }
      t *= 0.5;
    }
    if (!stepped) {
      // Newton direction exhausted at this precision; try plain projected
      // gradient before giving up
      double tg = 1.0 / (1.0 + trace);
      for (int back = 0; back < 60 && !stepped; ++back) {
        std::vector<double> cand = out.lambda;
        for (std::size_t j = 0; j < m; ++j) cand[j] = std::max(0.0, cand[j] - tg * grad[j]);
        const double g_cand = dual_value(cand);
        if (g_cand < g_cur) {
          out.lambda = std::move(cand);
          g_cur = g_cand;
          stepped = true;
        }
        tg *= 0.5;
      }
    }
    if (!stepped) {
      out.converged = pg <= 1e-8;
      break;
    }
  }

  field(out.lambda, f);
  out.x.assign(n, 0.0);
  out.objective = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (b[i] == 0.0) continue;
    out.x[i] = b[i] / f[i];
    out.objective += b[i] * std::log(out.x[i]);
  }
  return out;
}

}  // namespace latlab::detail
