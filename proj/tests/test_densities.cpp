#include <cmath>
#include <numbers>
#include <string>

#include "anticonc/densities.hpp"
#include "anticonc/errors.hpp"
#include "doctest.h"

using namespace anticonc;

namespace {
const std::string_view kAll[] = {kStdGaussian, kExponential, kHalfGaussian};
}

TEST_CASE("standard densities: names and V") {
  const Density1D g = standard_density(kStdGaussian);
  CHECK(g.V(0.0) == doctest::Approx(0.5 * std::log(2 * std::numbers::pi)).epsilon(1e-12));
  CHECK(g.V(0.0) == doctest::Approx(0.918939).epsilon(1e-6));
  CHECK_FALSE(g.half_line());
  CHECK(standard_density(kExponential).half_line());
  CHECK(standard_density(kHalfGaussian).half_line());
  CHECK_THROWS_AS(standard_density("cauchy"), ConfigError);
}

TEST_CASE("normalization") {
  for (auto name : kAll) {
    CAPTURE(name);
    CHECK(std::abs(normalization(standard_density(name)) - 1.0) < 1e-6);
  }
}

TEST_CASE("derivatives match finite differences") {
  CounterRng rng = seed_stream(5, 0, 0);
  for (auto name : kAll) {
    const Density1D f = standard_density(name);
    for (int k = 0; k < 100; ++k) {
      const double x = f.half_line() ? 0.05 + 4.0 * rng.uniform() : 8.0 * rng.uniform() - 4.0;
      const double h = 1e-5;
      const double fd1 = (f.V(x + h) - f.V(x - h)) / (2 * h);
      const double fd2 = (f.dV(x + h) - f.dV(x - h)) / (2 * h);
      CAPTURE(name);
      CAPTURE(x);
      CHECK(std::abs(fd1 - f.dV(x)) <= 1e-5 * std::max(1.0, std::abs(f.dV(x))));
      CHECK(std::abs(fd2 - f.d2V(x)) <= 1e-5 * std::max(1.0, std::abs(f.d2V(x))));
    }
  }
}

TEST_CASE("exponential sampler mean") {
  const Density1D f = standard_density(kExponential);
  const auto v = sample_iid(f, 100000, SeedStream(11, 0));
  CHECK(std::abs(v.mean() - 1.0) < 0.02);
  CHECK(v.minCoeff() >= 0.0);
}

TEST_CASE("sample_iid is deterministic") {
  const Density1D f = standard_density(kStdGaussian);
  CHECK(sample_iid(f, 50, SeedStream(4, 2)) == sample_iid(f, 50, SeedStream(4, 2)));
  CHECK(sample_iid(f, 50, SeedStream(4, 2)) != sample_iid(f, 50, SeedStream(4, 3)));
  CHECK_THROWS_AS(sample_iid(f, 0, SeedStream(4, 2)), DomainError);
}

TEST_CASE("hellinger affinity examples") {
  const Density1D e = standard_density(kExponential);
  CHECK(hellinger_affinity(e, e).rho == doctest::Approx(1.0).epsilon(1e-12));

  const double r = hellinger_affinity(e, scaled_density(e, 0.2)).rho;
  CHECK(std::abs(r - 2 * std::sqrt(1.2) / 2.2) < 1e-9);
  CHECK(r == doctest::Approx(0.995859).epsilon(1e-6));

  const Density1D g = standard_density(kStdGaussian);
  const double s2 = 1 / 1.1;
  const double rg = hellinger_affinity(g, scaled_density(g, 0.1)).rho;
  CHECK(std::abs(rg - std::sqrt(2 * s2 / (1 + s2 * s2))) < 1e-9);
  CHECK(rg == doctest::Approx(0.997735).epsilon(1e-6));
}

TEST_CASE("hellinger affinity is symmetric and needs matching supports") {
  for (auto name : kAll) {
    const Density1D f = standard_density(name);
    const Density1D g = scaled_density(f, -0.3);
    CHECK(std::abs(hellinger_affinity(f, g).rho - hellinger_affinity(g, f).rho) < 1e-10);
  }
  CHECK_THROWS_AS(hellinger_affinity(standard_density(kStdGaussian), standard_density(kExponential)), DomainError);
}

TEST_CASE("scaled affinity: domain and closed forms") {
  const Density1D e = standard_density(kExponential);
  CHECK(scaled_affinity(e, 0.0).rho == 1.0);
  CHECK(scaled_affinity(e, 0.2).rho == doctest::Approx(0.995859).epsilon(1e-6));
  CHECK_THROWS_AS(scaled_affinity(e, 0.5), DomainError);
  CHECK_THROWS_AS(scaled_affinity(e, -0.5), DomainError);
  for (auto name : kAll) {
    for (double eps : {-0.3, -0.04, 0.005, 0.01, 0.02, 0.04, 0.3}) {
      const auto cf = scaled_affinity_closed_form(name, eps);
      REQUIRE(cf.has_value());
      const auto q = scaled_affinity(standard_density(name), eps);
      CAPTURE(name);
      CAPTURE(eps);
      CHECK(std::abs(*cf - q.rho) < 1e-7);
      CHECK(q.rho <= 1.0);
      CHECK(q.rho >= 0.0);
    }
  }
}

TEST_CASE("quadratic affinity law") {
  const double grid[] = {0.005, 0.01, 0.02, 0.04};
  for (auto name : kAll) {
    const Density1D f = standard_density(name);
    double lo = 1e300, hi = 0;
    for (double eps : grid) {
      const double c = (1 - scaled_affinity(f, eps).rho) / (eps * eps);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    CAPTURE(name);
    CHECK(hi / lo - 1 <= 0.10);
    CHECK(empirical_affinity_constant(f, grid) == doctest::Approx(hi).epsilon(1e-12));
  }
  const Density1D g = standard_density(kStdGaussian);
  const double c1 = (1 - scaled_affinity(g, 0.01).rho) / 1e-4;
  for (double eps : {0.02, 0.04}) {
    CHECK(std::abs((1 - scaled_affinity(g, eps).rho) / (eps * eps) / c1 - 1) <= 0.05);
  }
}
