#include <catch2/catch_amalgamated.hpp>

#include "latlab/core.hpp"
#include "latlab/rng.hpp"

using namespace latlab;
using Catch::Approx;

namespace {

bool well_formed(const FiniteVector& v) {
  Index prev = 0;
  for (const Entry& e : v.entries()) {
    if (e.index <= prev) return false;
    if (e.value == 0.0) return false;
    prev = e.index;
  }
  return true;
}

FiniteVector random_int_vector(Rng& rng) {
  std::vector<Entry> es;
  const int k = static_cast<int>(rng.integer(0, 6));
  for (Index i : rng.distinct_indices(1, 20, k))
    es.push_back({i, static_cast<double>(rng.integer(-9, 9))});
  return FiniteVector::from_entries(std::move(es));
}

}  // namespace

TEST_CASE("construction normalizes entries", "[core]") {
  FiniteVector v = FiniteVector::from_entries({{5, 1.0}, {2, 3.0}, {5, -1.0}, {9, 0.0}});
  CHECK(v.support() == std::vector<Index>{2});
  CHECK(v.at(2) == 3.0);
  CHECK(v.at(5) == 0.0);
  CHECK(well_formed(v));

  CHECK_THROWS_AS(FiniteVector::of({{0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(FiniteVector::of({{1, std::nan("")}}), std::invalid_argument);
}

TEST_CASE("pointwise power preserves the support", "[core]") {
  CHECK(FiniteVector::of({{1, 4.0}}).pointwise_power(0.5) == FiniteVector::of({{1, 2.0}}));
  CHECK(FiniteVector::of({{2, -3.0}}).pointwise_power(2.0) == FiniteVector::of({{2, 9.0}}));
  CHECK(FiniteVector::of({{1, 1.0}, {3, 8.0}}).pointwise_power(1.0 / 3.0) ==
        FiniteVector::of({{1, 1.0}, {3, 2.0}}));
  CHECK_THROWS_AS(FiniteVector::unit(1).pointwise_power(0.0), std::invalid_argument);
}

TEST_CASE("lattice operations keep the representation invariant", "[core]") {
  Rng rng(11);
  for (int s = 0; s < 200; ++s) {
    FiniteVector v = random_int_vector(rng), w = random_int_vector(rng);
    FiniteVector jv = join(v, w), mv = meet(v, w);
    CHECK(well_formed(jv));
    CHECK(well_formed(mv));
    for (Index i = 1; i <= 20; ++i) {
      CHECK(jv.at(i) == std::max(v.at(i), w.at(i)));
      CHECK(mv.at(i) == std::min(v.at(i), w.at(i)));
    }
    auto [pos, neg] = v.sign_split();
    CHECK(pos.disjoint_from(neg));
    CHECK(pos - neg == v);
    CHECK(well_formed(v.abs()));
    CHECK((v + w) - w == v);  // integer values: exact
    CHECK(well_formed(hadamard(v, w)));
  }
}

TEST_CASE("vector utilities", "[core]") {
  FiniteVector v = FiniteVector::of({{1, 3.0}, {4, -4.0}});
  CHECK(v.l1() == 7.0);
  CHECK(v.linf() == 4.0);
  CHECK(v.sum() == -1.0);
  CHECK(dot(v, FiniteVector::of({{4, 2.0}})) == -8.0);
  CHECK(v.shifted(2).support() == std::vector<Index>{3, 6});
  CHECK(v.restricted_to_range(1, 2).support() == std::vector<Index>{1});
  CHECK(v.abs().with_signs_of(v) == v);
  CHECK(max_abs_dev(v, v) == 0.0);
  CHECK(max_abs_dev(v, FiniteVector::unit(1)) == 4.0);

  FiniteVector z;
  CHECK(z.is_zero());
  CHECK(z.l1() == 0.0);
  CHECK_THROWS_AS(z.min_index(), std::logic_error);
}

TEST_CASE("derived rng streams are stable and mergeable", "[core][rng]") {
  // shard determinism: the trial stream depends only on (seed, trial)
  std::vector<double> full, merged;
  for (int t = 0; t < 10; ++t) {
    Rng r = Rng::derive(99, t);
    full.push_back(r.u01());
  }
  for (int t = 0; t < 5; ++t) {
    Rng r = Rng::derive(99, t);
    merged.push_back(r.u01());
  }
  for (int t = 5; t < 10; ++t) {
    Rng r = Rng::derive(99, t);
    merged.push_back(r.u01());
  }
  CHECK(full == merged);

  Rng a(3), b(3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(4);
  bool differs = false;
  Rng a2(3);
  for (int i = 0; i < 100; ++i) differs = differs || (a2.next_u64() != c.next_u64());
  CHECK(differs);

  Rng r(5);
  for (int i = 0; i < 1000; ++i) {
    double u = r.u01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.exponential() > 0.0);
    std::int64_t n = r.integer(-3, 3);
    CHECK(n >= -3);
    CHECK(n <= 3);
  }
}
