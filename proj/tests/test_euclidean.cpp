#include <cmath>
#include <numbers>

#include "anticonc/densities.hpp"
#include "anticonc/errors.hpp"
#include "anticonc/euclidean.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace anticonc;

namespace {

PointSet<double> uniform_points(int n, std::uint64_t seed) {
  CounterRng rng = seed_stream(seed, 0, 0);
  PointSet<double> p(2, n);
  for (int i = 0; i < n; ++i) {
    p(0, i) = rng.uniform();
    p(1, i) = rng.uniform();
  }
  return p;
}

PointSet<double> square() {
  PointSet<double> p(2, 4);
  p << 0, 1, 1, 0, 0, 0, 1, 1;
  return p;
}

}  // namespace

TEST_CASE("tsp exact examples") {
  PointSet<double> tri(2, 3);
  tri << 0, 1, 0, 0, 0, 1;
  CHECK(tsp_exact(tri).value == doctest::Approx(2 + std::numbers::sqrt2).epsilon(1e-14));
  CHECK(tsp_exact(square()).value == doctest::Approx(4.0).epsilon(1e-14));
  CHECK_THROWS_AS(tsp_exact(uniform_points(16, 1)), SizeError);
  CHECK_THROWS_AS(tsp_exact(uniform_points(2, 1)), SizeError);
}

TEST_CASE("held-karp equals permutation brute force") {
  for (int t = 0; t < 50; ++t) {
    const int n = 3 + t % 5;
    const auto p = uniform_points(n, 100 + t);
    const auto v = tsp_exact(p);
    CHECK(std::abs(v.value - oracle::brute_tsp(p)) < 1e-12);
    CHECK(std::abs(v.value - tour_length(p, v.tour)) < 1e-12);
    CHECK(v.tour.size() == static_cast<std::size_t>(n));
  }
}

TEST_CASE("2-opt") {
  // Convex position: a 2-opt local optimum is the hull perimeter.
  for (int n : {5, 8, 10}) {
    PointSet<double> p(2, n);
    for (int i = 0; i < n; ++i) {
      const double a = 2 * std::numbers::pi * ((i * 3) % n) / n;
      p(0, i) = std::cos(a);
      p(1, i) = std::sin(a);
    }
    CHECK(tsp_2opt(p, SeedStream(1, 0)).value == doctest::Approx(2 * n * std::sin(std::numbers::pi / n)).epsilon(1e-12));
  }
  int agree = 0;
  for (int t = 0; t < 100; ++t) {
    const auto p = uniform_points(10, 500 + t);
    const double exact = tsp_exact(p).value;
    const double heur = tsp_2opt(p, SeedStream(t, 0), 20).value;
    CHECK(heur >= exact - 1e-12);
    agree += heur <= exact * (1 + 1e-12);
  }
  CHECK(agree >= 90);
  CHECK_THROWS_AS(tsp_2opt(uniform_points(3, 1), SeedStream(1, 0)), SizeError);
}

TEST_CASE("matching") {
  PointSet<double> two(2, 2);
  two << 0, 3, 0, 4;
  CHECK(matching_exact(two).value == doctest::Approx(5.0));
  CHECK(matching_exact(square()).value == doctest::Approx(2.0));
  for (int t = 0; t < 30; ++t) {
    const int n = 2 + 2 * (t % 4);
    const auto p = uniform_points(n, 900 + t);
    const auto v = matching_exact(p);
    CHECK(std::abs(v.value - oracle::brute_matching(p)) < 1e-12);
    CHECK(v.pairs.size() == static_cast<std::size_t>(n / 2));
  }
  CHECK_THROWS_AS(matching_exact(uniform_points(7, 1)), SizeError);
  CHECK_THROWS_AS(matching_exact(uniform_points(18, 1)), SizeError);
}

TEST_CASE("nearest-neighbour sum") {
  PointSet<double> two(2, 2);
  two << 0, 3, 0, 4;
  CHECK(nn_sum(two).value == doctest::Approx(10.0));
  CHECK(nn_sum(square()).value == doctest::Approx(4.0));
  const auto p = uniform_points(10, 3);
  const auto d = oracle::distances(p);
  double s = 0;
  for (int i = 0; i < 10; ++i) {
    double b = 1e300;
    for (int j = 0; j < 10; ++j)
      if (j != i) b = std::min(b, d(i, j));
    s += b;
  }
  CHECK(nn_sum(p).value == doctest::Approx(s).epsilon(1e-14));
}

TEST_CASE("homogeneity and lower bounds") {
  for (int t = 0; t < 50; ++t) {
    const auto p = uniform_points(10, 2000 + t);
    const double tsp = tsp_exact(p).value;
    const double match = matching_exact(p).value;
    const double nn = nn_sum(p).value;
    CHECK(tsp >= nn - 1e-12);
    CHECK(match >= 0.5 * nn - 1e-12);
    for (double lam : {0.5, 2.0, 3.7}) {
      const PointSet<double> q = lam * p;
      CHECK(std::abs(tsp_exact(q).value - lam * tsp) <= 1e-9 * lam * tsp);
      CHECK(std::abs(matching_exact(q).value - lam * match) <= 1e-9 * lam * match);
      CHECK(std::abs(nn_sum(q).value - lam * nn) <= 1e-9 * lam * nn);
    }
  }
}

TEST_CASE("scaling coupling") {
  const Density1D g = standard_density(kStdGaussian);
  const auto p = uniform_points(9, 4);
  const auto null = scaling_coupling(p, 0.0, 1.0, FunctionalKind::TspExact, g);
  CHECK(null.L_prime == null.L);
  CHECK(null.tv_bound == 0.0);
  const auto c = scaling_coupling(p, 0.5, 1.0, FunctionalKind::TspExact, g);
  CHECK(c.eps == doctest::Approx(0.5 / 3));
  CHECK(std::abs(c.L_prime - c.L_prime_reevaluated) <= 1e-9 * c.L);
  CHECK(c.coordinate_count == 18.0);
  CHECK(c.tv_bound > 0.0);
  CHECK(c.tv_bound < 1.0);
  const auto fast = scaling_coupling(p, 0.5, 1.0, FunctionalKind::TspExact, c.per_coordinate_affinity);
  CHECK(fast.tv_bound == c.tv_bound);
  // Claiming degree 2 for a degree-1 functional must be caught.
  CHECK_THROWS_AS(scaling_coupling(p, 0.5, 2.0, FunctionalKind::TspExact, g), InternalError);
}

TEST_CASE("rhee affinity") {
  CHECK(rhee_affinity(1.0, 0.3) == doctest::Approx(1.0));
  CHECK(rhee_affinity(0.5, 0.0) == doctest::Approx(1.0));
  CHECK(rhee_affinity(0.25, 0.04) == doctest::Approx(0.75 * std::sqrt(0.96) + 0.25 * std::sqrt(1.12)).epsilon(1e-14));
  CHECK(rhee_affinity(0.25, 0.04) == doctest::Approx(0.999422).epsilon(1e-6));
  CHECK_THROWS_AS(rhee_affinity(0.0, 0.1), DomainError);
  CHECK_THROWS_AS(rhee_affinity(0.5, 1.0), DomainError);
}

TEST_CASE("rhee coupling sample") {
  const auto s0 = rhee_coupling_sample(12, 0.5, 0.0, SeedStream(3, 0));
  CHECK(s0.x_prime == s0.x);
  CHECK(s0.coupling.resample_indices.empty());
  CHECK(s0.coupling.exact_affinity_per_coordinate == doctest::Approx(1.0));
  CHECK(rhee_gap_statistics(s0, FunctionalKind::TspExact) == 0.0);

  const auto s = rhee_coupling_sample(12, 0.5, 1.0, SeedStream(3, 1));
  CHECK(s.coupling.m == 6);
  for (int i : s.coupling.resample_indices) {
    CHECK(i >= 6);
    CHECK(i < 12);
  }
  CHECK(s.coupling.vol_D_estimate > 0.0);
  CHECK(s.coupling.vol_D_estimate <= 1.0);
  CHECK(s.coupling.conservative_affinity <= s.coupling.exact_affinity_per_coordinate);
  CHECK((s.x.array() >= 0).all());
  CHECK((s.x.array() <= 1).all());
  const double gap = rhee_gap_statistics(s, FunctionalKind::TspExact);
  const auto w = tsp_exact(s.x);
  CHECK(std::abs(gap) <= rhee_surgery_bound(s, max_witness_edge(s.x, w)) + 1e-12);
}

TEST_CASE("rhee resampling count is binomial") {
  const std::size_t n = 16;
  const double beta = 2.0;
  const double theta = beta / 4.0;
  const int trials = 1000;
  double total = 0;
  for (int t = 0; t < trials; ++t) {
    total += double(rhee_coupling_sample(n, 0.5, beta, SeedStream(12, t)).coupling.resample_indices.size());
  }
  const double draws = trials * (n - n / 2.0);
  const double sd = std::sqrt(draws * theta * (1 - theta));
  CHECK(std::abs(total - draws * theta) <= 4 * sd);
}
