// scratch driver, not part of the suite
#include <cstdio>

#include "latlab/mazur.hpp"

using namespace latlab;

int main() {
  TsirelsonOptions qt;
  qt.use_disk_cache = false;

  {
    WeightVector b = WeightVector::checked(
        FiniteVector::of({{3, 0.141463}, {4, 0.363578}, {7, 0.494959}}));
    MazurSolution s = solve_F(Space::lp(1.5), b);
    std::printf("lp1.5: method=%s iters=%d cuts=%d kkt=%.3e conv=%d\n", s.method.c_str(),
                s.iterations, s.cuts_used, s.kkt_residual, s.converged);
    FiniteVector expect = b.vec().pointwise_power(1.0 / 1.5);
    std::printf("  dev=%.3e\n", max_abs_dev(s.x, expect));
  }
  {
    WeightVector b = WeightVector::checked(
        FiniteVector::of({{1, 0.334585}, {2, 0.438998}, {4, 0.159587}, {5, 0.06683}}));
    FiniteVector bb = b.vec().scaled(1.0 / b.vec().sum());
    WeightVector b2 = WeightVector::normalized(bb);
    Space conv = Space::convexify(Space::tsirelson(qt), 3.0);
    MazurSolution s = solve_F(conv, b2);
    std::printf("convexT: method=%s iters=%d cuts=%d kkt=%.3e conv=%d nx=%.12f\n",
                s.method.c_str(), s.iterations, s.cuts_used, s.kkt_residual, s.converged,
                norm(conv, s.x));
    MazurSolution base = solve_F(Space::tsirelson(qt), b2);
    std::printf("baseT: method=%s iters=%d cuts=%d kkt=%.3e conv=%d\n", base.method.c_str(),
                base.iterations, base.cuts_used, base.kkt_residual, base.converged);
    std::printf("  dev=%.3e\n", max_abs_dev(s.x, base.x.pointwise_power(1.0 / 3.0)));
    std::printf("  lhs=%s\n  rhs=%s\n", s.x.to_string().c_str(),
                base.x.pointwise_power(1.0 / 3.0).to_string().c_str());
  }
  return 0;
}
