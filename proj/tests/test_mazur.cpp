#include <catch2/catch_amalgamated.hpp>

#include "latlab/mazur.hpp"
#include "latlab/rng.hpp"
#include "latlab/sampling.hpp"

using namespace latlab;
using Catch::Approx;

namespace {

TsirelsonOptions quiet_ts() {
  TsirelsonOptions o;
  o.use_disk_cache = false;
  return o;
}

WeightVector random_weights(Rng& rng, int dim, Index max_index) {
  std::vector<Entry> es;
  for (Index i : rng.distinct_indices(1, max_index, dim)) es.push_back({i, rng.exponential()});
  return WeightVector::normalized(FiniteVector::from_entries(std::move(es)));
}

}  // namespace

TEST_CASE("weight vectors validate their mass", "[mazur]") {
  CHECK_THROWS_AS(WeightVector::checked(FiniteVector::of({{1, -0.5}, {2, 1.5}})),
                  std::invalid_argument);
  CHECK_THROWS_AS(WeightVector::checked(FiniteVector::of({{1, 0.7}})), std::invalid_argument);
  CHECK_NOTHROW(WeightVector::checked(FiniteVector::of({{1, 0.25}, {3, 0.75}})));
  WeightVector w = WeightVector::normalized(FiniteVector::of({{1, -3.0}, {2, 1.0}}));
  CHECK(w.vec().at(1) == 0.75);
}

TEST_CASE("geometric mean", "[mazur]") {
  WeightVector b1 = WeightVector::checked(FiniteVector::of({{1, 1.0}}));
  CHECK(geometric_mean(b1, FiniteVector::of({{1, 0.5}})) == 0.5);

  WeightVector bh = WeightVector::checked(FiniteVector::of({{1, 0.5}, {2, 0.5}}));
  CHECK(geometric_mean(bh, FiniteVector::of({{1, 1.0}, {2, 1.0}})) == 1.0);
  CHECK(geometric_mean(bh, FiniteVector::of({{1, 0.25}, {2, 1.0}})) == Approx(0.5).epsilon(1e-15));
  CHECK(geometric_mean(bh, FiniteVector::of({{1, 1.0}})) == 0.0);  // missing coordinate
  CHECK_THROWS_AS(geometric_mean(bh, FiniteVector::of({{1, -1.0}, {2, 1.0}})),
                  std::invalid_argument);
}

TEST_CASE("extremal vectors in lp: powered weights", "[mazur]") {
  Rng rng(21);
  for (double p : {1.0, 1.5, 2.0, 3.0, 4.0}) {
    for (int s = 0; s < 8; ++s) {
      WeightVector b = random_weights(rng, static_cast<int>(rng.integer(1, 8)), 12);
      MazurSolution sol = solve_F(Space::lp(p), b);
      CHECK(sol.converged);
      CHECK(sol.kkt_residual <= 1e-6);
      CHECK(sol.attained == Approx(1.0).margin(1e-9));
      FiniteVector expect = b.vec().pointwise_power(1.0 / p);
      INFO("p=" << p << " b=" << b.vec().to_string() << " method=" << sol.method);
      CHECK(max_abs_dev(sol.x, expect) <= 1e-7);
    }
  }

  // frozen closed-form instance
  MazurSolution sol =
      solve_F(Space::lp(3), WeightVector::checked(FiniteVector::of({{1, 0.5}, {2, 0.25}, {3, 0.25}})));
  CHECK(sol.x.at(1) == Approx(0.7937005259840998).margin(1e-6));
  CHECK(sol.x.at(2) == Approx(0.6299605249474366).margin(1e-6));
  CHECK(sol.x.at(3) == Approx(0.6299605249474366).margin(1e-6));
}

TEST_CASE("extremal vector in the sup norm is the flat vector", "[mazur]") {
  WeightVector b = WeightVector::checked(FiniteVector::of({{1, 0.6}, {3, 0.3}, {7, 0.1}}));
  MazurSolution sol = solve_F(Space::lp_inf(), b);
  CHECK(sol.converged);
  for (Index i : {Index(1), Index(3), Index(7)})
    CHECK(sol.x.at(i) == Approx(1.0).margin(1e-8));
}

TEST_CASE("extremal vector pinned to a corner of the implicit-norm sphere", "[mazur]") {
  // With uniform weights on {1,2,3,4} the maximizer sits where the sup facet
  // x_1 <= 1, the level-2 singleton-family facet (x2+x3+x4)/2 <= 1, and the
  // nested-family facet all bind: x = (1, 2/3, 2/3, 2/3), found by hand from
  // the facet list of the polytope on that support.
  Space T = Space::tsirelson(quiet_ts());
  WeightVector b = WeightVector::checked(
      FiniteVector::of({{1, 0.25}, {2, 0.25}, {3, 0.25}, {4, 0.25}}));
  MazurSolution sol = solve_F(T, b);
  CHECK(sol.converged);
  CHECK(sol.kkt_residual <= 1e-6);
  CHECK(sol.x.at(1) == Approx(1.0).margin(1e-6));
  CHECK(sol.x.at(2) == Approx(2.0 / 3.0).margin(1e-6));
  CHECK(sol.x.at(3) == Approx(2.0 / 3.0).margin(1e-6));
  CHECK(sol.x.at(4) == Approx(2.0 / 3.0).margin(1e-6));
  CHECK(norm(T, sol.x) == Approx(1.0).margin(1e-9));
}

TEST_CASE("uniqueness surrogate: random restarts agree", "[mazur][slow]") {
  std::vector<Space> spaces = {Space::lp(2.5), Space::tsirelson(quiet_ts()),
                               Space::interpolate(Space::lp(1), Space::lp(2), 0.5)};
  Rng rng(31);
  for (const Space& space : spaces) {
    WeightVector b = random_weights(rng, 4, 6);
    MazurSolution ref = solve_F(space, b);
    REQUIRE(ref.converged);
    for (int restart = 0; restart < 5; ++restart) {
      std::vector<Entry> init;
      for (const Entry& e : b.vec().entries())
        init.push_back({e.index, std::exp(rng.uniform(-1.5, 1.5))});
      SolveOptions opt;
      opt.initial = FiniteVector::from_entries(std::move(init));
      MazurSolution sol = solve_F(space, b, opt);
      INFO(space.to_string() << " restart " << restart << " method=" << sol.method);
      CHECK(sol.converged);
      CHECK(max_abs_dev(sol.x, ref.x) <= 1e-5);
    }
  }
}

TEST_CASE("ball maps: closed-form values and sign equivariance", "[mazur][maps]") {
  BallMap up = extend_map(Space::lp(2), MapDirection::from_l1);
  CHECK(up.eval(FiniteVector{}).is_zero());

  FiniteVector b = FiniteVector::of({{1, 0.36}, {2, 0.64}});
  FiniteVector img = up.eval(b);
  CHECK(img.at(1) == Approx(0.6).margin(1e-7));
  CHECK(img.at(2) == Approx(0.8).margin(1e-7));

  FiniteVector flipped = FiniteVector::of({{1, -0.36}, {2, 0.64}});
  FiniteVector fimg = up.eval(flipped);
  CHECK(fimg.at(1) == Approx(-0.6).margin(1e-7));
  CHECK(fimg.at(2) == Approx(0.8).margin(1e-7));
}

TEST_CASE("ball maps: round trip and norm preservation", "[mazur][maps][slow]") {
  struct PairCase {
    Space a;
    int dim;
  };
  std::vector<PairCase> cases = {{Space::lp(2), 6}, {Space::lp(4), 6}};
  Rng rng(41);
  for (const auto& c : cases) {
    BallMap up = extend_map(c.a, MapDirection::from_l1);
    BallMap down = extend_map(c.a, MapDirection::to_l1);
    std::vector<Index> support;
    for (Index i = 1; i <= c.dim; ++i) support.push_back(i);
    for (int s = 0; s < 40; ++s) {
      FiniteVector v = sample_ball_point(Space::lp(1), support, 1.0, rng);
      if (v.is_zero()) continue;
      FiniteVector w = up.eval(v);
      CHECK(std::fabs(norm(c.a, w) - v.l1()) <= 2e-6);
      FiniteVector back = down.eval(w);
      INFO(c.a.to_string() << " v=" << v.to_string());
      CHECK(max_abs_dev(back, v) <= 1e-6);

      // the other direction through the l1 ball
      FiniteVector u = sample_ball_point(c.a, support, 1.0, rng);
      if (u.is_zero()) continue;
      FiniteVector roundtrip = up.eval(down.eval(u));
      CHECK(max_abs_dev(roundtrip, u) <= 1e-6);
    }
  }
}

TEST_CASE("composed maps: coordinatewise power between lp balls", "[mazur][maps]") {
  BallMap m24 = compose_map(Space::lp(2), Space::lp(4));
  FiniteVector x = FiniteVector::of({{1, 0.6}, {2, 0.8}});
  FiniteVector y = m24.eval(x);
  CHECK(y.at(1) == Approx(std::sqrt(0.6)).margin(1e-7));
  CHECK(y.at(2) == Approx(std::sqrt(0.8)).margin(1e-7));
  CHECK(norm(Space::lp(4), y) == Approx(1.0).margin(2e-6));

  // identity composition
  BallMap same = compose_map(Space::lp(3), Space::lp(3));
  Rng rng(51);
  for (int s = 0; s < 20; ++s) {
    FiniteVector v = sample_ball_point(Space::lp(3), {1, 2, 3, 4}, 1.0, rng);
    if (v.is_zero()) continue;
    CHECK(max_abs_dev(same.eval(v), v) <= 1e-6);
  }

  // composing with the identity leg reduces to the plain extension
  BallMap lifted = compose_map(Space::lp(1), Space::lp(2));
  BallMap direct = extend_map(Space::lp(2), MapDirection::from_l1);
  FiniteVector b = FiniteVector::of({{1, 0.5}, {2, -0.25}, {3, 0.25}});
  CHECK(max_abs_dev(lifted.eval(b), direct.eval(b)) <= 1e-6);
}

TEST_CASE("factorization identity for Calderon products", "[mazur][lemma42]") {
  WeightVector bh = WeightVector::checked(FiniteVector::of({{1, 0.5}, {2, 0.5}}));
  FactorizationCheck flat = verify_lemma42(Space::lp(1), Space::lp_inf(), 0.5, bh);
  CHECK(flat.max_dev <= 1e-6);
  CHECK(flat.lhs.at(1) == Approx(std::sqrt(0.5)).margin(1e-6));
  CHECK(flat.lhs.at(2) == Approx(std::sqrt(0.5)).margin(1e-6));

  Rng rng(61);
  for (int s = 0; s < 6; ++s) {
    WeightVector b = random_weights(rng, 4, 6);
    FactorizationCheck c = verify_lemma42(Space::lp(2), Space::lp(6), 0.5, b);
    INFO("b=" << b.vec().to_string());
    CHECK(c.lhs_converged);
    CHECK(c.rhs_converged);
    CHECK(c.max_dev <= 1e-5);
  }

  // the near-degenerate parameter keeps both sides close to the Y-solution
  WeightVector b = random_weights(rng, 3, 5);
  FactorizationCheck near1 = verify_lemma42(Space::lp(2), Space::lp(4), 0.999, b);
  CHECK(near1.max_dev <= 1e-4);
  CHECK(max_abs_dev(near1.lhs, solve_F(Space::lp(2), b).x) <= 5e-3);
}

TEST_CASE("powered-solution identity for convexifications", "[mazur][cor43]") {
  Rng rng(71);
  for (double theta : {0.5, 1.0 / 3.0}) {
    WeightVector b = random_weights(rng, 4, 6);
    FactorizationCheck l1case = verify_cor43(Space::lp(1), theta, b);
    CHECK(l1case.max_dev <= 1e-6);

    FactorizationCheck tcase = verify_cor43(Space::tsirelson(quiet_ts()), theta, b);
    INFO("theta=" << theta << " b=" << b.vec().to_string());
    CHECK(tcase.lhs_converged);
    CHECK(tcase.rhs_converged);
    CHECK(tcase.max_dev <= 1e-5);
  }
  CHECK_THROWS_AS(verify_cor43(Space::lp(1), 1.0, WeightVector::checked(FiniteVector::of({{1, 1.0}}))),
                  std::invalid_argument);
}

TEST_CASE("p-convex r-concave factor decomposition", "[mazur][lemma44]") {
  FactorDecomposition deg = construct_lemma44(2.0, 2.0, Space::lp(2));
  CHECK(deg.degenerate);
  CHECK(deg.theta == 1.0);

  FactorDecomposition top = construct_lemma44(2.0, 4.0, Space::lp(4));
  CHECK(top.degenerate);
  CHECK(top.theta == 0.0);

  FactorDecomposition d = construct_lemma44(2.0, 3.0, Space::lp(3));
  CHECK(d.theta == Approx(1.0 / 3.0).epsilon(1e-15));
  REQUIRE(lp_exponent(d.factor).has_value());
  CHECK(lp_exponent(d.factor).value() == Approx(4.0).epsilon(1e-12));

  // the interpolation of lp(p) against the factor reproduces X
  Space recombined = Space::interpolate(Space::lp(2), d.factor, d.theta);
  Rng rng(81);
  for (int s = 0; s < 10; ++s) {
    std::vector<Entry> es;
    for (Index i : rng.distinct_indices(1, 6, static_cast<int>(rng.integer(1, 4))))
      es.push_back({i, rng.sign() * std::exp(rng.uniform(-1.0, 1.0))});
    FiniteVector v = FiniteVector::from_entries(std::move(es));
    INFO("v=" << v.to_string());
    CHECK(norm(recombined, v) == Approx(norm(Space::lp(3), v)).margin(1e-4));
  }

  // the 1-convex case splits off a 2-concave factor directly
  FactorDecomposition d1 = construct_lemma44(1.0, 1.5, Space::lp(1.5));
  CHECK(d1.theta == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(lp_exponent(d1.factor).value() == Approx(2.0).epsilon(1e-12));

  CHECK_THROWS_AS(construct_lemma44(2.0, 5.0, Space::lp(3)), std::invalid_argument);
  CHECK_THROWS_AS(construct_lemma44(2.0, 1.5, Space::lp(3)), std::invalid_argument);
}

TEST_CASE("explicit modulus terms", "[mazur][modulus]") {
  ModulusBound fwd = modulus_bound_45_46(2.0, 3.0, 0.125, ModulusDirection::forward);
  CHECK(fwd.leading == Approx(1.0).epsilon(1e-12));  // 2 * 0.125^{1/3}
  CHECK(fwd.phi0_coefficient == Approx(1.0 / 3.0).epsilon(1e-12));

  ModulusBound flat = modulus_bound_45_46(2.0, 2.0, 0.25, ModulusDirection::forward);
  CHECK(flat.leading == Approx(0.5).epsilon(1e-12));  // exponent 2p/r - 1 = 1
  CHECK(flat.phi0_coefficient == 0.0);

  ModulusBound inv = modulus_bound_45_46(2.0, 4.0, 0.25, ModulusDirection::inverse);
  CHECK(inv.leading == Approx(0.5).epsilon(1e-12));
  CHECK(inv.phi0_coefficient == Approx(std::sqrt(0.5)).epsilon(1e-12));

  CHECK_THROWS_AS(modulus_bound_45_46(2.0, 5.0, 0.1, ModulusDirection::forward),
                  std::invalid_argument);
  CHECK_THROWS_AS(modulus_bound_45_46(2.0, 3.0, 3.0, ModulusDirection::forward),
                  std::invalid_argument);
}

TEST_CASE("coupled block maps stay norm preserving and homogeneous", "[mazur][maps]") {
  Space src = Space::direct_sum({{1, 4, Space::lp(1)}, {5, 8, Space::lp(1)}}, Space::lp(2));
  Space dst = Space::direct_sum({{1, 4, Space::lp(2)}, {5, 8, Space::lp(3)}}, Space::lp(2));
  BallMap coupling = coupled_map(src, dst,
                                 {extend_map(Space::lp(2), MapDirection::from_l1),
                                  extend_map(Space::lp(3), MapDirection::from_l1)});
  Rng rng(91);
  for (int s = 0; s < 15; ++s) {
    FiniteVector v = sample_ball_point(src, {1, 2, 3, 6, 7}, 2.0, rng);
    if (v.is_zero()) continue;
    FiniteVector w = coupling.eval(v);
    CHECK(std::fabs(norm(dst, w) - norm(src, v)) <= 2e-6);
    FiniteVector w2 = coupling.eval(v.scaled(2.0));
    CHECK(max_abs_dev(w2, w.scaled(2.0)) <= 1e-6);
  }
  CHECK(coupling.eval(FiniteVector{}).is_zero());

  CHECK_THROWS_AS(coupled_map(Space::lp(2), dst, {}), std::invalid_argument);
  Space misaligned = Space::direct_sum({{1, 3, Space::lp(2)}, {5, 8, Space::lp(3)}}, Space::lp(2));
  CHECK_THROWS_AS(coupled_map(src, misaligned,
                              {extend_map(Space::lp(2), MapDirection::from_l1),
                               extend_map(Space::lp(3), MapDirection::from_l1)}),
                  std::invalid_argument);
}
