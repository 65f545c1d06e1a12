#include <cmath>
#include <numbers>

#include "anticonc/densities.hpp"
#include "anticonc/errors.hpp"
#include "anticonc/fpp.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace anticonc;

namespace {

FppGrid random_grid(int w, int h, Vertex s, Vertex t, std::uint64_t seed) {
  CounterRng rng = seed_stream(seed, 0, 0);
  Eigen::VectorXd wts(static_cast<Eigen::Index>(FppGrid::edge_count(w, h)));
  for (auto& x : wts) x = 0.1 + rng.exponential();
  return FppGrid(w, h, wts, s, t);
}

void check_geodesic(const FppGrid& g, const GeodesicResult& geo) {
  REQUIRE(!geo.path.empty());
  CHECK(geo.path.front() == g.source());
  CHECK(geo.path.back() == g.target());
  CHECK(geo.edge_list.size() + 1 == geo.path.size());
  double sum = 0;
  for (std::size_t i = 0; i < geo.edge_list.size(); ++i) {
    CHECK(g.edge_between(geo.path[i], geo.path[i + 1]) == static_cast<long>(geo.edge_list[i]));
    sum += g.weight(geo.edge_list[i]);
  }
  CHECK(std::abs(sum - geo.passage_time) <= 1e-12 * std::max(1.0, sum));
  std::vector<char> seen(g.vertex_count(), 0);
  for (const Vertex& v : geo.path) {
    CHECK_FALSE(seen[g.vertex_id(v)]);
    seen[g.vertex_id(v)] = 1;
  }
}

}  // namespace

TEST_CASE("grid indexing") {
  const FppGrid g(3, 2, Eigen::VectorXd::Ones(7), {0, 0}, {2, 1});
  CHECK(g.edge_count() == 7);
  CHECK(g.edge(0).a == Vertex{0, 0});
  CHECK(g.edge(0).b == Vertex{1, 0});
  CHECK(g.edge(4).a == Vertex{0, 0});
  CHECK(g.edge(4).b == Vertex{0, 1});
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const Edge ed = g.edge(e);
    CHECK(ed.a < ed.b);
    CHECK(g.edge_between(ed.a, ed.b) == static_cast<long>(e));
    CHECK(g.edge_between(ed.b, ed.a) == static_cast<long>(e));
  }
  CHECK(g.edge_between({0, 0}, {1, 1}) == -1);
  CHECK(g.vertex(g.vertex_id({2, 1})) == Vertex{2, 1});
  CHECK_THROWS_AS(FppGrid(3, 2, Eigen::VectorXd::Ones(6), {0, 0}, {2, 1}), ShapeError);
  CHECK_THROWS_AS(FppGrid(3, 2, -Eigen::VectorXd::Ones(7), {0, 0}, {2, 1}), DomainError);
  CHECK_THROWS_AS(FppGrid(3, 2, Eigen::VectorXd::Ones(7), {0, 0}, {0, 0}), DomainError);
}

TEST_CASE("unit weights give the L1 distance") {
  for (int k = 1; k <= 6; ++k) {
    const FppGrid g(8, 3, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(FppGrid::edge_count(8, 3))), {0, 0}, {k, 0});
    const auto geo = passage_time(g);
    CHECK(geo.passage_time == doctest::Approx(double(k)));
    check_geodesic(g, geo);
  }
}

TEST_CASE("dijkstra equals path enumeration") {
  for (int t = 0; t < 40; ++t) {
    const FppGrid g = random_grid(3, 3, {0, t % 3}, {2, (t / 3) % 3}, 100 + t);
    const auto geo = passage_time(g);
    check_geodesic(g, geo);
    CHECK(std::abs(geo.passage_time - oracle::brute_passage_time(g)) <= 1e-12);
  }
  for (int t = 0; t < 10; ++t) {
    const FppGrid g = random_grid(4, 4, {0, 1}, {3, 2}, 300 + t);
    CHECK(std::abs(passage_time(g).passage_time - oracle::brute_passage_time(g)) <= 1e-12);
  }
}

TEST_CASE("box construction") {
  const Density1D e = standard_density(kExponential);
  const FppGrid g = make_box(8, e, SeedStream(1, 0));
  CHECK(g.width() == 17);
  CHECK(g.height() == 17);
  CHECK(g.source() == Vertex{4, 8});
  CHECK(g.target() == Vertex{12, 8});
  CHECK(g.weights() == make_box(8, e, SeedStream(1, 0)).weights());
  CHECK(g.weights() != make_box(8, e, SeedStream(1, 1)).weights());
  CHECK_THROWS_AS(make_box(7, e, SeedStream(1, 0)), SizeError);
  CHECK_THROWS_AS(make_box(8, standard_density(kStdGaussian), SeedStream(1, 0)), DomainError);
  const auto geo = passage_time(g);
  check_geodesic(g, geo);
  CHECK(geo.edge_list.size() >= 8);
}

TEST_CASE("monotonicity in single edge weights") {
  const Density1D e = standard_density(kExponential);
  const FppGrid g = make_box(8, e, SeedStream(4, 0));
  const double T = passage_time(g).passage_time;
  CounterRng rng = seed_stream(4, 1, 0);
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd w = g.weights();
    const auto idx = static_cast<Eigen::Index>(rng.below(g.edge_count()));
    w[idx] *= rng.uniform_open();
    CHECK(passage_time(g.with_weights(w)).passage_time <= T + 1e-12);
  }
}

TEST_CASE("doubling weights doubles T") {
  const FppGrid g = make_box(6, standard_density(kHalfGaussian), SeedStream(2, 0));
  const auto a = passage_time(g);
  const auto b = passage_time(g.with_weights(2.0 * g.weights()));
  CHECK(b.passage_time == doctest::Approx(2 * a.passage_time).epsilon(1e-14));
  CHECK(b.edge_list == a.edge_list);
}

TEST_CASE("graded schedule") {
  const FppGrid g = make_box(16, standard_density(kExponential), SeedStream(1, 0));
  const double n = std::exp(4.0);
  const auto s = graded_schedule(g, 1.0, n);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    const int k = edge_distance(g, e);
    const double v = s.values[static_cast<Eigen::Index>(e)];
    if (k == 0) CHECK(v == doctest::Approx(0.5).epsilon(1e-14));
    if (k <= n / 2) CHECK(v == doctest::Approx(1.0 / ((k + 1) * 2.0)).epsilon(1e-14));
  }
  const auto s16 = graded_schedule(g, 1.0, 16.0);
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    if (edge_distance(g, e) > 8) CHECK(s16.values[static_cast<Eigen::Index>(e)] == 0.0);
  }
  CHECK_THROWS_AS(graded_schedule(g, 1.0, 4.0), DomainError);
  const auto zero = graded_schedule(g, 0.0, 16.0);
  CHECK(perturb(g, zero).weights() == g.weights());
  CHECK(schedule_tv_bound(zero, standard_density(kExponential)) == 0.0);
}

TEST_CASE("square sum stays bounded in n") {
  double lo = 1e300, hi = 0;
  for (int n : {16, 32, 64}) {
    const int side = 2 * n + 1;
    const FppGrid shape(side, side, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(FppGrid::edge_count(side, side))),
                        {n / 2, n}, {3 * n / 2, n});
    const double c = schedule_square_sum(graded_schedule(shape, 0.7, n)) / (0.7 * 0.7);
    lo = std::min(lo, c);
    hi = std::max(hi, c);
  }
  CHECK(hi / lo <= 1.25);
}

TEST_CASE("single edge perturbation on the geodesic") {
  const FppGrid g = make_box(8, standard_density(kExponential), SeedStream(6, 0));
  const auto geo = passage_time(g);
  for (std::size_t e : geo.edge_list) {
    EpsSchedule s;
    s.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.edge_count()));
    s.values[static_cast<Eigen::Index>(e)] = 0.3;
    const double Tp = passage_time(perturb(g, s)).passage_time;
    const double drop = 0.3 * g.weight(e) / 1.3;
    CHECK(geo.passage_time - Tp <= drop + 1e-12);
    CHECK(geo.passage_time - Tp >= drop - 1e-12);
  }
}

TEST_CASE("ttq lower bound per sample") {
  const Density1D e = standard_density(kExponential);
  for (int seed = 0; seed < 100; ++seed) {
    const FppGrid g = make_box(16, e, SeedStream(seed, 0));
    const auto sched = graded_schedule(g, 0.5, 16.0);
    const auto geo = passage_time(g);
    const double Tp = passage_time(perturb(g, sched)).passage_time;
    const double b = ttq_lower_bound(geo, g, sched, 8);
    CHECK(geo.passage_time - Tp >= b - 1e-10);
    CHECK(ttq_lower_bound(geo, g, sched, 0) == 0.0);
  }
  const FppGrid g = make_box(8, e, SeedStream(1, 0));
  const auto geo = passage_time(g);
  CHECK(ttq_lower_bound(geo, g, graded_schedule(g, 0.0, 8.0), 4) == 0.0);
  CHECK_THROWS_AS(ttq_lower_bound(geo, g, graded_schedule(g, 0.5, 8.0), geo.edge_list.size() + 1), DomainError);
}

TEST_CASE("corridor schedule and containment") {
  const Density1D e = standard_density(kExponential);
  const FppGrid g = make_box(32, e, SeedStream(3, 0));
  const auto s = corridor_schedule(g, 0.5, 32.0, 0.01);
  const double eps = 0.5 * std::pow(32.0, -0.885);
  CHECK(s.corridor_width == doctest::Approx(std::pow(32.0, 0.77)));
  for (Eigen::Index k = 0; k < s.values.size(); ++k) CHECK((s.values[k] == 0.0 || s.values[k] == eps));
  int contained = 0;
  for (int seed = 0; seed < 20; ++seed) {
    const FppGrid b = make_box(32, e, SeedStream(seed, 0));
    const auto geo = passage_time(b);
    const double Tp = passage_time(perturb(b, s)).passage_time;
    const auto cc = corridor_check(geo, s, Tp);
    CHECK(cc.holds);
    contained += cc.contained;
    if (cc.contained) CHECK(Tp <= geo.passage_time / (1 + eps) + 1e-10);
  }
  MESSAGE("corridor containment " << contained << "/20");

  // A corridor wider than the box gives a uniform schedule.
  const FppGrid small = make_box(6, e, SeedStream(1, 0));
  const auto wide = corridor_schedule(small, 0.5, 6.0, 0.2);
  CHECK(wide.clipped);
  CHECK(wide.values.minCoeff() == wide.values.maxCoeff());
  CHECK(wide.values.minCoeff() > 0.0);
}

TEST_CASE("laplace transform and path weight tail") {
  const Density1D e = standard_density(kExponential);
  for (double th : {0.0, 0.5, 2.0, 10.0}) CHECK(phi_laplace(e, th) == doctest::Approx(1 / (1 + th)).epsilon(1e-9));
  CHECK(path_weight_tail(e, 10, 0.1) == doctest::Approx(std::pow(std::numbers::e / 11, 10)).epsilon(1e-8));
  CHECK(path_weight_tail(e, 10, 0.1) == doctest::Approx(8.49e-7).epsilon(1e-3));
  CHECK(path_weight_tail(e, 10, 1e6) == 1.0);
  CHECK_THROWS_AS(path_weight_tail(e, 0, 0.1), DomainError);
  CHECK_THROWS_AS(phi_laplace(standard_density(kStdGaussian), 1.0), DomainError);

  for (int r : {5, 10}) {
    const double b = 0.2;
    const double bound = path_weight_tail(e, r, b);
    CounterRng rng = seed_stream(99, static_cast<std::uint64_t>(r), 0);
    const int trials = 100000;
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
      double s = 0;
      for (int i = 0; i < r; ++i) s += rng.exponential();
      hits += s <= b * r;
    }
    CHECK(double(hits) / trials <= bound);
  }
}

TEST_CASE("schedule tv bound is a product over active edges") {
  const Density1D e = standard_density(kExponential);
  const FppGrid g = make_box(8, e, SeedStream(1, 0));
  const auto s = graded_schedule(g, 0.5, 8.0);
  double lr = 0;
  for (Eigen::Index k = 0; k < s.values.size(); ++k)
    if (s.values[k] > 0) lr += std::log(*scaled_affinity_closed_form(kExponential, s.values[k]));
  CHECK(schedule_log_affinity(s, e) == doctest::Approx(lr).epsilon(1e-7));
  CHECK(schedule_tv_bound(s, e) == doctest::Approx(std::sqrt(-std::expm1(2 * lr))).epsilon(1e-6));
}
