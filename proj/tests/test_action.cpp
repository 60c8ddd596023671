#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>

#include "explab/action.hpp"
#include "explab/families.hpp"

using namespace explab;

namespace {

FiniteAction weighted_swap() {
  Vec w(2);
  w << 1.0 / 3.0, 2.0 / 3.0;
  return gen_cycle(2, w);
}

}  // namespace

TEST_CASE("generator set validation") {
  CHECK_THROWS_AS(GeneratorSet({"a"}, {1}, {1}), Error);        // inverse out of range
  CHECK_THROWS_AS(GeneratorSet({"a", "b"}, {1, 0}, {1, 2}), Error);  // paired lengths differ
  CHECK_THROWS_AS(GeneratorSet({"a"}, {0}, {-1}), Error);       // negative length
  CHECK_THROWS_AS(GeneratorSet({"a", "a"}, {0, 1}, {1, 1}), Error);  // duplicate symbol
  CHECK_THROWS_AS(GeneratorSet({"a", "e"}, {0, 1}, {0, 0}), Error);  // two length-0 symbols
}

TEST_CASE("identity bookkeeping") {
  GeneratorSet g({"e", "s", "t"}, {0, 2, 1}, {0, 1, 1});
  CHECK(g.count() == 3);
  REQUIRE(g.identity().has_value());
  CHECK(*g.identity() == 0);
  CHECK(g.inverse(1) == 2);
  CHECK(g.max_length() == 1);

  GeneratorSet h({"s"}, {0}, {1});
  CHECK_FALSE(h.identity().has_value());
  CHECK(h.max_length() == 1);
}

TEST_CASE("action validation") {
  FiniteMeasureSpace sp = FiniteMeasureSpace::uniform(3);
  GeneratorSet g({"s", "s_inv"}, {1, 0}, {1, 1});
  CHECK_THROWS_AS(FiniteAction(sp, g, {{1, 2, 0}}), Error);           // perm count mismatch
  CHECK_THROWS_AS(FiniteAction(sp, g, {{1, 1, 0}, {2, 0, 1}}), Error);  // not a bijection
  CHECK_THROWS_AS(FiniteAction(sp, g, {{1, 2, 0}, {1, 2, 0}}), Error);  // inverse pair disagrees
  CHECK_NOTHROW(FiniteAction(sp, g, {{1, 2, 0}, {2, 0, 1}}));

  GeneratorSet with_e({"e", "s"}, {0, 1}, {0, 2});
  CHECK_THROWS_AS(FiniteAction(sp, with_e, {{1, 2, 0}, {0, 2, 1}}), Error);  // identity must fix atoms
}

TEST_CASE("ball image grows arcs on the cycle") {
  FiniteAction a = gen_cycle(8);
  CHECK(ball_image(a, {0}, 0) == AtomSet{0});
  CHECK(ball_image(a, {0}, 1) == AtomSet{0, 1, 7});
  CHECK(ball_image(a, {0}, 3) == AtomSet{0, 1, 2, 3, 5, 6, 7});
  CHECK(ball_image(a, {0}, 4) == AtomSet{0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(ball_image(a, {0, 4}, 1) == AtomSet{0, 1, 3, 4, 5, 7});
  CHECK_THROWS_AS(ball_image(a, {0}, -1), Error);
}

TEST_CASE("orbit distances on the cycle") {
  FiniteAction a = gen_cycle(8);
  CHECK(orbit_distance(a, 0, 0) == 0);
  CHECK(orbit_distance(a, 0, 3) == 3);
  CHECK(orbit_distance(a, 0, 4) == 4);
  CHECK(orbit_distance(a, 0, 7) == 1);
  auto table = orbit_distance_table(a);
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      int d = std::min((x - y + 8) % 8, (y - x + 8) % 8);
      CHECK(table[x][y] == d);
    }
}

TEST_CASE("orbit distance detects disconnection") {
  FiniteAction a = gen_margulis_torus(3);
  int origin = a.space().index_of("0,0");
  int offdiag = a.space().index_of("1,2");
  CHECK_FALSE(orbit_distance(a, origin, offdiag).has_value());
  CHECK(orbit_distance(a, origin, origin) == 0);
  auto table = orbit_distance_table(a);
  CHECK(table[origin][offdiag] == -1);
  CHECK(table[offdiag][origin] == -1);

  // Shear moves are unit steps in the word metric.
  int right = a.space().index_of("1,0");
  int sheared = a.space().index_of("1,1");
  CHECK(table[right][sheared] == 1);
}

TEST_CASE("radon nikodym table and inversion") {
  FiniteAction a = weighted_swap();
  RadonNikodymTable rn(a);
  int s = 1;  // the swap symbol; index 0 is the identity
  REQUIRE(a.gens().identity().has_value());
  CHECK(a.gens().length(s) == 1);
  CHECK(rn.r(s, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rn.r(s, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rn.r(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rn.inversion_residual(a) <= 1e-12);

  FiniteAction c = gen_cycle(6);
  RadonNikodymTable rnc(c);
  for (int g = 0; g < c.gens().count(); ++g)
    for (int x = 0; x < 6; ++x) CHECK(rnc.r(g, x) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("half density pairing hand value") {
  // Integrating f = 1 against the swap over the full space gives
  // nu(0) sqrt(2) + nu(1) sqrt(1/2) = sqrt2/3 + sqrt2/3.
  FiniteAction a = weighted_swap();
  RadonNikodymTable rn(a);
  Vec f = Vec::Ones(2);
  double got = half_density_pairing(a, rn, 1, {0, 1}, f);
  CHECK(got == doctest::Approx(2.0 * std::sqrt(2.0) / 3.0).epsilon(1e-12));
  double half = half_density_pairing(a, rn, 1, {0}, f);
  CHECK(half == doctest::Approx(std::sqrt(2.0) / 3.0).epsilon(1e-12));
}

TEST_CASE("theta bound") {
  FiniteAction c = gen_cycle(5);
  std::vector<int> all;
  for (int s = 0; s < c.gens().count(); ++s) all.push_back(s);
  CHECK(theta_bound(c, {0, 1, 2, 3, 4}, all) == doctest::Approx(1.0).epsilon(1e-12));

  FiniteAction w = weighted_swap();
  std::vector<int> ws;
  for (int s = 0; s < w.gens().count(); ++s) ws.push_back(s);
  CHECK(theta_bound(w, {0, 1}, ws) == doctest::Approx(2.0).epsilon(1e-12));
  // Restricting Y to one atom leaves only identity moves inside Y.
  CHECK(theta_bound(w, {0}, ws) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(theta_bound(w, {}, ws), Error);
}

TEST_CASE("freeness probe") {
  CHECK(is_free_up_to(gen_cycle(8), 3));
  // Rotations fix either every atom or none, so the full loop at radius 8
  // acts as the identity and freeness survives.
  CHECK(is_free_up_to(gen_cycle(8), 8));
  CHECK_FALSE(is_free_up_to(gen_margulis_torus(2), 2));  // shears fix the origin
}
