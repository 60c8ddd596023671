#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "explab/families.hpp"
#include "explab/operators.hpp"
#include "explab/random_models.hpp"

using namespace explab;

namespace {

AtomSet all_atoms(int n) {
  AtomSet y;
  for (int i = 0; i < n; ++i) y.push_back(i);
  return y;
}

AtomSet complement(const AtomSet& a, int n) {
  AtomSet out;
  for (int i = 0, j = 0; i < n; ++i) {
    if (j < static_cast<int>(a.size()) && a[j] == i)
      ++j;
    else
      out.push_back(i);
  }
  return out;
}

}  // namespace

TEST_CASE("generator operators are frame permutations") {
  FiniteAction a = gen_cycle(8);
  WeightedOperator u = generator_operator(a, 1);
  CHECK(operator_norm(u) == doctest::Approx(1.0).epsilon(1e-12));
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) CHECK(u.a(y, x) == ((a.apply(1, x) == y) ? 1.0 : 0.0));

  WeightedOperator ui = generator_operator(a, a.gens().inverse(1));
  Mat prod = compose(u, ui).a;
  CHECK((prod - Mat::Identity(8, 8)).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((identity_operator(a.space()).a - Mat::Identity(8, 8)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("function kernels enter the frame symmetrically") {
  MarkovKernel k = two_point_kernel(0.2, 0.5);
  const Vec& m = k.reversing_or_fail();
  FiniteMeasureSpace sp(
      std::vector<std::string>{k.space().id(0), k.space().id(1)}, m);
  WeightedOperator t = from_function_kernel(sp, k.transition());
  Mat sym = symmetrized(k, m);
  CHECK((t.a - sym).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("averaging projection and rank one cut norms") {
  FiniteMeasureSpace sp = FiniteMeasureSpace::uniform(2);
  RankOneProjection p = averaging_projection(sp, {0, 1});
  CHECK(p.xi.norm() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p.matrix()(0, 1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(cut_norm(p, {0}, {1}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cut_norm(p.as_operator(), {0}, {1}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cut_norm(p, {}, {1}) == 0.0);

  // The closed form sqrt(nu(A) nu(C)) on a probability space.
  FiniteMeasureSpace sp8 = FiniteMeasureSpace::uniform(8);
  RankOneProjection p8 = averaging_projection(sp8, all_atoms(8));
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    AtomSet a = random_nonempty_subset(8, rng);
    AtomSet c = random_nonempty_subset(8, rng);
    double na = sp8.mass(a), nc = sp8.mass(c);
    CHECK(cut_norm(p8, a, c) == doctest::Approx(std::sqrt(na * nc)).epsilon(1e-12));
    CHECK(cut_norm(p8.as_operator(), a, c) == doctest::Approx(std::sqrt(na * nc)).epsilon(1e-12));
  }

  // Monotone in both arguments.
  CHECK(cut_norm(p8, {0}, {4}) <= cut_norm(p8, {0, 1}, {4}) + 1e-14);
  CHECK(cut_norm(p8, {0, 1}, {4}) <= cut_norm(p8, {0, 1}, {4, 5}) + 1e-14);

  RankOneProjection part = averaging_projection(sp8, {0, 1, 2});
  CHECK(part.xi(5) == 0.0);
  CHECK(part.xi(0) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));
}

TEST_CASE("propagation of concrete operators") {
  FiniteAction a = gen_cycle(8);
  CHECK(rho_propagation(identity_operator(a.space()), a) == 0);
  CHECK(rho_propagation(generator_operator(a, 1), a) == 1);

  RankOneProjection full = averaging_projection(a.space(), all_atoms(8));
  CHECK(rho_propagation(full.as_operator(), a) == 4);  // the orbit diameter

  FiniteAction mg = gen_margulis_torus(2);
  RankOneProjection pm = averaging_projection(mg.space(), all_atoms(4));
  CHECK_FALSE(rho_propagation(pm.as_operator(), mg).has_value());  // couples distinct orbits
}

TEST_CASE("truncation enforces propagation") {
  FiniteAction a = gen_cycle(8);
  WeightedOperator p = averaging_projection(a.space(), all_atoms(8)).as_operator();
  WeightedOperator t1 = truncate_to_propagation(p, a, 1);
  CHECK(rho_propagation(t1, a) == 1);
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      int d = std::min((x - y + 8) % 8, (y - x + 8) % 8);
      CHECK(t1.a(x, y) == (d <= 1 ? p.a(x, y) : 0.0));
    }
  WeightedOperator t1b = truncate_to_propagation(t1, a, 1);
  CHECK((t1.a - t1b.a).cwiseAbs().maxCoeff() == 0.0);

  FiniteAction mg = gen_margulis_torus(2);
  WeightedOperator pm = averaging_projection(mg.space(), all_atoms(4)).as_operator();
  WeightedOperator tm = truncate_to_propagation(pm, mg, 2);
  CHECK(rho_propagation(tm, mg) <= 2);  // cross-orbit entries dropped
}

TEST_CASE("hat embedding projection on the weighted swap") {
  Vec w(2);
  w << 1.0 / 3.0, 2.0 / 3.0;
  ActionKernel ak = build_action_kernel(gen_cycle(2, w));
  RankOneProjection hat = hat_embedding_projection(ak);
  CHECK(hat.xi.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hat.xi(0) * hat.xi(0) == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("markov powers on the lazy cycle") {
  ActionKernel ak = build_action_kernel(gen_cycle(8));
  PowerReport rep = markov_power_report(ak, 12);
  CHECK(rep.has_gap);
  double lam = (1.0 + std::sqrt(2.0)) / 3.0;
  CHECK(rep.lambda_hat == doctest::Approx(lam).epsilon(1e-12));
  CHECK(rep.max_length == 1);
  REQUIRE(rep.norms.size() == 12);
  REQUIRE(rep.bounds.size() == 12);
  REQUIRE(rep.propagation.size() == 12);
  CHECK(rep.norms_bounded);
  CHECK(rep.propagation_bounded);
  CHECK(rep.norms[0] == doctest::Approx(lam).epsilon(1e-12));
  for (int n = 1; n <= 12; ++n) {
    CHECK(rep.bounds[n - 1] == doctest::Approx(std::pow(lam, n)).epsilon(1e-10));
    CHECK(rep.norms[n - 1] <= rep.bounds[n - 1] + 1e-10);
    CHECK(rep.propagation[n - 1] <= n);
    CHECK(rep.propagation[n - 1] >= 0);
  }
}

TEST_CASE("rank one local kernel converges immediately") {
  Vec w(2);
  w << 1.0 / 3.0, 2.0 / 3.0;
  ActionKernel ak = build_action_kernel(gen_cycle(2, w));
  PowerReport rep = markov_power_report(ak, 6);
  CHECK(rep.has_gap);
  CHECK(rep.lambda_hat <= 1e-12);
  for (double n : rep.norms) CHECK(n <= 1e-12);
}

TEST_CASE("zero extension embedding lands on the scaled projection") {
  Vec w(2);
  w << 1.0 / 3.0, 2.0 / 3.0;
  ActionKernel ak = build_action_kernel(gen_cycle(2, w));
  AdReport rep = ad_embedding_report(ak, 8);
  CHECK(rep.scale == doctest::Approx(3.0 / (3.0 + 2.0 * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(rep.identity_deviation <= 1e-12);
  CHECK(rep.has_gap);
  REQUIRE(rep.power_norms.size() == 8);
  CHECK(rep.power_norms[0] <= 1e-12);  // the local kernel is already its own limit

  ActionKernel ak8 = build_action_kernel(gen_cycle(8));
  AdReport r8 = ad_embedding_report(ak8, 8);
  CHECK(r8.identity_deviation <= 1e-12);
  CHECK(r8.has_gap);
  for (size_t i = 0; i + 1 < r8.power_norms.size(); ++i)
    CHECK(r8.power_norms[i + 1] <= r8.power_norms[i] + 1e-12);
}

TEST_CASE("quasi locality of the averaging projection") {
  FiniteAction a = gen_cycle(8);
  WeightedOperator p = averaging_projection(a.space(), all_atoms(8)).as_operator();
  QuasiLocalityProfile prof = rho_quasi_locality_profile(p, a, {0, 1, 2, 3, 4});
  REQUIRE(prof.exact);
  REQUIRE(prof.eps.size() == 5);
  CHECK(prof.eps[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(prof.eps[1] == doctest::Approx(3.0 / 8.0).epsilon(1e-12));
  CHECK(prof.eps[2] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(prof.eps[3] == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
  CHECK(prof.eps[4] == 0.0);
  for (size_t i = 0; i < prof.eps.size(); ++i) {
    if (prof.eps[i] == 0.0) continue;
    const auto& [wa, wc] = prof.witnesses[i];
    CHECK(cut_norm(p, wa, wc) == doctest::Approx(prof.eps[i]).epsilon(1e-12));
    // The witness pair is admissible: the grown set misses C.
    AtomSet grown = ball_image(a, wa, static_cast<int>(prof.radii[i]));
    for (int x : wc)
      for (int y : grown) CHECK(x != y);
  }
}

TEST_CASE("sampled quasi locality stays a lower bound") {
  FiniteAction a = gen_cycle(8);
  WeightedOperator p = averaging_projection(a.space(), all_atoms(8)).as_operator();
  QuasiLocalityProfile exact = rho_quasi_locality_profile(p, a, {1, 2, 3});
  QuasiLocalityProfile sampled = rho_quasi_locality_profile(p, a, {1, 2, 3}, 4, 9, 2000);
  CHECK_FALSE(sampled.exact);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(sampled.eps[i] <= exact.eps[i] + 1e-12);
    const auto& [wa, wc] = sampled.witnesses[i];
    if (!wa.empty() && !wc.empty())
      CHECK(cut_norm(p, wa, wc) == doctest::Approx(sampled.eps[i]).epsilon(1e-12));
    // Singleton seeds guarantee at least the one-atom value.
    double singleton = std::sqrt((1.0 / 8.0) * ((5.0 - 2.0 * static_cast<double>(i)) / 8.0));
    CHECK(sampled.eps[i] >= singleton - 1e-12);
  }

  // Determinism: same seed, same draws.
  QuasiLocalityProfile again = rho_quasi_locality_profile(p, a, {1, 2, 3}, 4, 9, 2000);
  CHECK(again.eps == sampled.eps);
}

TEST_CASE("warped quasi locality of a truncated operator") {
  FiniteAction a = gen_cycle(8);
  FiniteMetric base(cycle_chord_metric(8));
  FiniteMetric w = warp(base, a, 64.0);
  WeightedOperator p = averaging_projection(a.space(), all_atoms(8)).as_operator();
  WeightedOperator t2 = truncate_to_propagation(p, a, 2);
  QuasiLocalityProfile prof = warped_quasi_locality_profile(t2, w, {2.0, 8.0});
  REQUIRE(prof.exact);
  // Entries reach warped distance at most 2, so both radii are silent.
  CHECK(prof.eps[0] <= 1e-12);
  CHECK(prof.eps[1] <= 1e-12);
}

TEST_CASE("ghost statistic of the flat torus tower") {
  FiniteAction mg = gen_margulis_torus(2);
  WarpedCone cone(FiniteMetric(torus_chord_metric(2)), mg);
  RankOneProjection p = averaging_projection(mg.space(), all_atoms(4));
  auto levels = ghost_profile(p, cone, {16.0}, 2.0);
  REQUIRE(levels.size() == 1);
  CHECK(levels[0].t == 16.0);
  CHECK(levels[0].g == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
  CHECK(levels[0].argmax == mg.space().index_of("1,1"));

  std::vector<RefiningLevel> tower;
  tower.push_back({gen_margulis_torus(2), FiniteMetric(torus_chord_metric(2)), 16.0});
  tower.push_back({gen_margulis_torus(4), FiniteMetric(torus_chord_metric(4)), 32.0});
  auto gs = ghost_profile_refining(tower, 2.0);
  REQUIRE(gs.size() == 2);
  CHECK(gs[0].g == doctest::Approx(0.8660254037844386).epsilon(1e-12));
  CHECK(gs[1].g == doctest::Approx(0.55901699437494745).epsilon(1e-12));
  CHECK(gs[1].g < gs[0].g);
}

TEST_CASE("finite propagation witnesses") {
  ActionKernel ak = build_action_kernel(gen_cycle(8));
  PowerReport powers = markov_power_report(ak, 12);
  PropagationWitness w = finite_propagation_witness(ak, 3);
  CHECK(w.k == 3);
  CHECK(w.power_n == 3);
  CHECK(w.power_bound == doctest::Approx(powers.norms[2]).epsilon(1e-12));
  CHECK(w.truncation_bound == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("poincare obstruction on the cycle") {
  ActionKernel ak = build_action_kernel(gen_cycle(8));
  FiniteMetric base(cycle_chord_metric(8));
  std::mt19937_64 rng(51);
  std::vector<Mat> embeddings;
  std::vector<double> ts = {1.0, 2.0, 4.0};
  for (size_t i = 0; i < ts.size(); ++i) {
    Mat e(8, 3);
    for (int c = 0; c < 3; ++c) e.col(c) = random_vector(8, rng);
    embeddings.push_back(e);
  }
  PoincareReport rep = poincare_obstruction_witness(ak, base, ts, embeddings);
  CHECK(rep.all_hold);
  REQUIRE(rep.levels.size() == 3);
  for (const PoincareLevel& lv : rep.levels) {
    CHECK(lv.holds);
    CHECK(lv.lhs <= lv.rhs + 1e-9);
    CHECK(lv.image_spread <= lv.spread_bound + 1e-9);
    CHECK(lv.max_warped_distance > 0.0);
    CHECK(lv.theta == doctest::Approx(1.0).epsilon(1e-12));
  }
}
