#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "explab/families.hpp"
#include "explab/warped.hpp"

using namespace explab;

TEST_CASE("cycle on two atoms is the swap") {
  FiniteAction a = gen_cycle(2);
  CHECK(a.gens().count() == 2);
  CHECK(a.gens().symbol(1) == "s");
  CHECK(a.gens().inverse(1) == 1);
  CHECK(a.apply(1, 0) == 1);
  CHECK(a.apply(1, 1) == 0);
  CHECK(a.space().weight(0) == 0.5);
}

TEST_CASE("cycle generators rotate both ways") {
  FiniteAction a = gen_cycle(5);
  CHECK(a.gens().count() == 3);
  int plus = 1, minus = 2;
  CHECK(a.gens().symbol(plus) == "+1");
  CHECK(a.gens().inverse(plus) == minus);
  for (int x = 0; x < 5; ++x) {
    CHECK(a.apply(plus, x) == (x + 1) % 5);
    CHECK(a.apply(minus, x) == (x + 4) % 5);
  }
}

TEST_CASE("cycle input validation") {
  CHECK_THROWS_AS(gen_cycle(1), Error);
  Vec w(3);
  w << 0.5, 0.0, 0.5;
  CHECK_THROWS_AS(gen_cycle(3, w), Error);  // zero weight would drop an atom
}

TEST_CASE("margulis torus shears") {
  FiniteAction a = gen_margulis_torus(3);
  CHECK(a.size() == 9);
  CHECK(a.gens().count() == 5);
  auto at = [&](const std::string& id) { return a.space().index_of(id); };
  // a:(x,y) -> (x+y,y), b:(x,y) -> (x,x+y), both mod 3.
  CHECK(a.apply(1, at("1,2")) == at("0,2"));
  CHECK(a.apply(3, at("1,2")) == at("1,0"));
  CHECK(a.apply(1, at("0,0")) == at("0,0"));
  CHECK(a.apply(3, at("0,0")) == at("0,0"));
  CHECK(a.apply(2, a.apply(1, at("2,1"))) == at("2,1"));
  CHECK(a.space().weight(0) == doctest::Approx(1.0 / 9.0));
}

TEST_CASE("dyadic tower matches the plain cycle at each level") {
  ActionChain chain = gen_schreier_dyadic(3);
  REQUIRE(chain.levels.size() == 3);
  CHECK(chain.levels[0].size() == 2);
  CHECK(chain.levels[1].size() == 4);
  CHECK(chain.levels[2].size() == 8);

  FiniteAction c8 = gen_cycle(8);
  for (int s = 1; s < 3; ++s)
    for (int x = 0; x < 8; ++x) CHECK(chain.levels[2].apply(s, x) == c8.apply(s, x));

  // Level 1 is non-faithful: both rotations are the swap.
  CHECK(chain.levels[0].perm(1) == chain.levels[0].perm(2));

  for (std::size_t i = 1; i < chain.levels.size(); ++i) {
    const auto& proj = chain.projections[i];
    int n = chain.levels[i].size();
    for (int x = 0; x < n; ++x) CHECK(proj[x] == x % (n / 2));
  }
}

TEST_CASE("chain validation rejects broken towers") {
  FiniteAction lower = gen_cycle(2);
  FiniteAction upper = gen_cycle(4);
  // gen_cycle(2) and gen_cycle(4) declare different symbol tables.
  CHECK_THROWS_AS(gen_schreier_chain({lower, upper}, {{}, {0, 1, 0, 1}}), Error);

  FiniteAction l2 = gen_schreier_dyadic(2).levels[0];
  CHECK_THROWS_AS(gen_schreier_chain({l2, upper}, {{}, {0, 0, 1, 1}}), Error);  // not equivariant
  CHECK_THROWS_AS(gen_schreier_chain({l2, upper}, {{0, 1}, {0, 1, 0, 1}}), Error);  // level 0 projects
  CHECK_THROWS_AS(gen_schreier_chain({l2, upper}, {{}, {0, 1, 0}}), Error);  // wrong length
  CHECK_NOTHROW(gen_schreier_chain({l2, upper}, {{}, {0, 1, 0, 1}}));
  CHECK_THROWS_AS(gen_schreier_dyadic(0), Error);
  CHECK_THROWS_AS(gen_schreier_dyadic(13), Error);
}

TEST_CASE("chord metrics are metrics with diameter two") {
  for (int n : {3, 4, 8, 13, 16}) {
    Mat d = cycle_chord_metric(n);
    CHECK(d.maxCoeff() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_NOTHROW(FiniteMetric{d});
    CHECK(d(0, 1) == doctest::Approx(d(0, n - 1)).epsilon(1e-12));
  }
  for (int n : {2, 3, 4}) {
    Mat d = torus_chord_metric(n);
    CHECK(d.rows() == n * n);
    CHECK(d.maxCoeff() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK_NOTHROW(FiniteMetric{d});
  }
  // The flat product shape: distance along one coordinate uses that circle.
  Mat t3 = torus_chord_metric(3);
  Mat c3 = cycle_chord_metric(3);
  double scale = t3(0, 1) / c3(0, 1);
  CHECK(t3(0, 3) == doctest::Approx(scale * c3(0, 1)).epsilon(1e-12));
  CHECK(t3(0, 4) == doctest::Approx(scale * std::hypot(c3(0, 1), c3(0, 1))).epsilon(1e-12));
}

TEST_CASE("two point kernel parameters") {
  MarkovKernel k = two_point_kernel(0.2, 0.5);
  const Mat& p = k.transition();
  CHECK(p(0, 0) == doctest::Approx(0.8));
  CHECK(p(0, 1) == doctest::Approx(0.2));
  CHECK(p(1, 0) == doctest::Approx(0.5));
  REQUIRE(k.reversing_measure().has_value());
  CHECK((*k.reversing_measure())(0) == doctest::Approx(5.0 / 7.0).epsilon(1e-12));
  CHECK_THROWS_AS(two_point_kernel(0.0, 0.5), Error);
  CHECK_THROWS_AS(two_point_kernel(0.3, 1.5), Error);
  CHECK_THROWS_AS(lazy_cycle_kernel(2), Error);
  CHECK_THROWS_AS(uniform_kernel(0), Error);
}

TEST_CASE("builtin registry") {
  Builtin cyc = make_builtin("cycle:8");
  CHECK(cyc.action.has_value());
  CHECK(cyc.metric.has_value());
  CHECK_FALSE(cyc.kernel.has_value());
  CHECK_FALSE(cyc.chain.has_value());
  CHECK(cyc.action->size() == 8);

  Builtin wc = make_builtin("weighted-cycle:2");
  REQUIRE(wc.action.has_value());
  CHECK(wc.action->space().weight(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(wc.action->space().weight(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  Builtin tp = make_builtin("two-point:0.3,0.3");
  CHECK(tp.kernel.has_value());
  CHECK_FALSE(tp.action.has_value());

  Builtin dy = make_builtin("schreier-dyadic:3");
  REQUIRE(dy.chain.has_value());
  CHECK(dy.chain->levels.size() == 3);

  for (const char* bad : {"cycle", "cycle:1", "cycle:2.5", "cycle:x", "margulis:1", "nope:3",
                          "two-point:0.3", "two-point:0,0.5", "schreier-dyadic:0", ""}) {
    try {
      make_builtin(bad);
      FAIL_CHECK("expected a parse failure for " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::parse);
    }
  }
}

TEST_CASE("roster entries all build") {
  auto roster = builtin_roster();
  CHECK(roster.size() == 11);
  for (const auto& spec : roster) {
    Builtin b = make_builtin(spec);
    CHECK((b.action || b.kernel || b.chain));
  }
}
