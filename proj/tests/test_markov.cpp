#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "explab/families.hpp"
#include "explab/markov.hpp"
#include "explab/random_models.hpp"

using namespace explab;

TEST_CASE("measure space validation") {
  CHECK_THROWS_AS(FiniteMeasureSpace({"a", "b"}, Vec::Ones(3)), Error);
  CHECK_THROWS_AS(FiniteMeasureSpace({}, Vec()), Error);
  Vec neg(2);
  neg << 1.0, -0.5;
  CHECK_THROWS_AS(FiniteMeasureSpace({"a", "b"}, neg), Error);
  Vec zeros = Vec::Zero(2);
  CHECK_THROWS_AS(FiniteMeasureSpace({"a", "b"}, zeros), Error);
  CHECK_THROWS_AS(FiniteMeasureSpace({"a", "a"}, Vec::Ones(2)), Error);

  // Weight-zero atoms are dropped, not kept around as isolated points.
  Vec w(3);
  w << 0.5, 0.0, 1.5;
  FiniteMeasureSpace sp({"a", "b", "c"}, w);
  CHECK(sp.size() == 2);
  CHECK(sp.id(0) == "a");
  CHECK(sp.id(1) == "c");
  CHECK(sp.total() == 2.0);
  CHECK(sp.index_of("c") == 1);
  CHECK_THROWS_AS(sp.index_of("b"), Error);
  CHECK(sp.mass({0, 1}) == 2.0);
  CHECK_THROWS_AS(sp.mass({1, 0}), Error);
}

TEST_CASE("kernel construction validation") {
  FiniteMeasureSpace sp = FiniteMeasureSpace::uniform(2);
  Mat bad_rows(2, 2);
  bad_rows << 0.6, 0.6, 0.5, 0.5;
  CHECK_THROWS_AS(MarkovKernel(sp, bad_rows), Error);
  Mat neg(2, 2);
  neg << 1.2, -0.2, 0.0, 1.0;
  CHECK_THROWS_AS(MarkovKernel(sp, neg), Error);
  CHECK_THROWS_AS(MarkovKernel(sp, Mat::Identity(3, 3)), Error);

  Mat p(2, 2);
  p << 0.5, 0.5, 0.3, 0.7;
  Vec m = Vec::Constant(2, 0.5);
  CHECK_THROWS_AS(MarkovKernel(sp, p, m), Error);  // balance fails at (0,1)
  MarkovKernel untagged(sp, p);
  CHECK_FALSE(untagged.reversing_measure().has_value());
  CHECK_THROWS_AS(untagged.reversing_or_fail(), Error);
}

TEST_CASE("reversing measure lookup") {
  MarkovKernel k = two_point_kernel(0.3, 0.3);
  REQUIRE(k.reversing_measure().has_value());
  const Vec& m = k.reversing_or_fail();
  CHECK(m(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m(1) == doctest::Approx(0.5).epsilon(1e-12));

  // Untagged symmetric kernel: the space weights reverse it.
  FiniteMeasureSpace sp = FiniteMeasureSpace::uniform(3);
  Mat p = Mat::Constant(3, 3, 1.0 / 3.0);
  MarkovKernel u(sp, p);
  CHECK(u.reversing_or_fail()(1) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("balance residual reports the attaining pair") {
  Mat p(2, 2);
  p << 0.5, 0.5, 0.3, 0.7;
  Vec m = Vec::Constant(2, 0.5);
  BalanceResidual r = detailed_balance_residual(p, m);
  CHECK(r.value == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(((r.x == 0 && r.y == 1) || (r.x == 1 && r.y == 0)));
}

TEST_CASE("two point kernel oracle") {
  MarkovKernel k = two_point_kernel(0.3, 0.3);
  const Vec& m = k.reversing_or_fail();
  SpectralReport sr = spectrum(k, m);
  CHECK(sr.lambda2 == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(sr.spectral_gap == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(sr.one_eigenspace_dim == 1);
  CHECK(sr.has_gap);
  CHECK(sr.eigenvalues.size() == 2);
  CHECK(sr.eigenvalues(0) == doctest::Approx(1.0).epsilon(1e-12));

  double b = boundary_size(k, m, {0});
  CHECK(b == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(boundary_size(k, m, {1}) == doctest::Approx(b).epsilon(1e-12));

  Vec f(2);
  f << 0.0, 1.0;
  CHECK(dirichlet_energy(k, m, f, 2.0) == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(dirichlet_energy(k, m, f, 1.0) == doctest::Approx(0.15).epsilon(1e-12));

  CVec g(2);
  g << std::complex<double>(1.0, 0.0), std::complex<double>(0.0, 1.0);
  CHECK(dirichlet_energy(k, m, g, 2.0) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("lazy cycle second eigenvalue") {
  for (int n : {3, 5, 8, 13}) {
    MarkovKernel k = lazy_cycle_kernel(n);
    double expected = (1.0 + 2.0 * std::cos(2.0 * std::numbers::pi / n)) / 3.0;
    SpectralReport sr = spectrum(k, k.reversing_or_fail());
    CHECK(sr.lambda2 == doctest::Approx(expected).epsilon(1e-11));
  }
}

TEST_CASE("uniform kernel collapses in one step") {
  MarkovKernel k = uniform_kernel(8);
  SpectralReport sr = spectrum(k, k.reversing_or_fail());
  CHECK(std::abs(sr.lambda2) <= 1e-12);
  CHECK(sr.spectral_gap == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sr.has_gap);
}

TEST_CASE("disconnected kernel reports multiplicity instead of failing") {
  FiniteMeasureSpace sp = FiniteMeasureSpace::uniform(4);
  Mat p = Mat::Zero(4, 4);
  p(0, 1) = p(1, 0) = 1.0;
  p(2, 3) = p(3, 2) = 1.0;
  MarkovKernel k(sp, p);
  SpectralReport sr = spectrum(k, k.reversing_or_fail());
  CHECK(sr.one_eigenspace_dim == 2);
  CHECK(sr.lambda2 == doctest::Approx(1.0));
  CHECK(sr.spectral_gap == doctest::Approx(0.0));
  CHECK_FALSE(sr.has_gap);
}

TEST_CASE("single atom spectrum") {
  FiniteMeasureSpace sp = FiniteMeasureSpace::uniform(1);
  MarkovKernel k(sp, Mat::Ones(1, 1));
  SpectralReport sr = spectrum(k, k.reversing_or_fail());
  CHECK(sr.lambda2 == 0.0);
  CHECK(sr.one_eigenspace_dim == 1);
  CHECK(sr.has_gap);
}

TEST_CASE("edge measure is symmetric for reversible kernels") {
  std::mt19937_64 rng(21);
  MarkovKernel k = random_reversible_kernel(6, rng);
  const Vec& m = k.reversing_or_fail();
  Mat mu = edge_measure(k, m);
  CHECK((mu - mu.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
  for (int x = 0; x < 6; ++x)
    for (int y = 0; y < 6; ++y)
      CHECK(mu(x, y) == doctest::Approx(m(x) * k.transition()(x, y)).epsilon(1e-13));
}

TEST_CASE("apply and dual apply") {
  std::mt19937_64 rng(22);
  MarkovKernel k = random_reversible_kernel(5, rng);
  const Vec& m = k.reversing_or_fail();

  Vec ones = Vec::Ones(5);
  CHECK((markov_apply(k, ones) - ones).cwiseAbs().maxCoeff() <= 1e-12);

  Vec pushed = dual_apply(k, m);
  CHECK((pushed - m).cwiseAbs().maxCoeff() <= 1e-10);

  Vec mu = random_vector(5, rng).cwiseAbs();
  CHECK(dual_apply(k, mu).sum() == doctest::Approx(mu.sum()).epsilon(1e-12));

  CVec cf(5);
  for (int i = 0; i < 5; ++i) cf(i) = std::complex<double>(i, -i);
  CVec applied = markov_apply(k, cf);
  Vec re(5), im(5);
  for (int i = 0; i < 5; ++i) {
    re(i) = cf(i).real();
    im(i) = cf(i).imag();
  }
  Vec re2 = markov_apply(k, re), im2 = markov_apply(k, im);
  for (int i = 0; i < 5; ++i) {
    CHECK(applied(i).real() == doctest::Approx(re2(i)).epsilon(1e-12));
    CHECK(applied(i).imag() == doctest::Approx(im2(i)).epsilon(1e-12));
  }
}

TEST_CASE("quadratic energy matches the gap form") {
  std::mt19937_64 rng(23);
  MarkovKernel k = random_reversible_kernel(7, rng);
  const Vec& m = k.reversing_or_fail();
  for (int trial = 0; trial < 20; ++trial) {
    Vec f = random_vector(7, rng);
    double lhs = dirichlet_energy(k, m, f, 2.0);
    Vec pf = markov_apply(k, f);
    double rhs = (f - pf).dot(m.asDiagonal() * f);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("boundary equals the complement boundary") {
  std::mt19937_64 rng(24);
  MarkovKernel k = random_reversible_kernel(8, rng);
  const Vec& m = k.reversing_or_fail();
  for (int trial = 0; trial < 30; ++trial) {
    AtomSet a = random_nonempty_subset(8, rng);
    if (static_cast<int>(a.size()) == 8) continue;
    AtomSet comp;
    for (int i = 0, j = 0; i < 8; ++i) {
      if (j < static_cast<int>(a.size()) && a[j] == i)
        ++j;
      else
        comp.push_back(i);
    }
    CHECK(boundary_size(k, m, a) == doctest::Approx(boundary_size(k, m, comp)).epsilon(1e-10));
  }
}

TEST_CASE("symmetrized matrix fixes the root measure") {
  MarkovKernel k = two_point_kernel(0.2, 0.5);
  const Vec& m = k.reversing_or_fail();
  Mat s = symmetrized(k, m);
  CHECK((s - s.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  Vec root = m.cwiseSqrt();
  CHECK((s * root - root).cwiseAbs().maxCoeff() <= 1e-12);
}
