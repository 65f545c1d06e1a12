// Acceptance run: one [PASS]/[FAIL] line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "anticonc/assignment.hpp"
#include "anticonc/coupling.hpp"
#include "anticonc/densities.hpp"
#include "anticonc/euclidean.hpp"
#include "anticonc/fpp.hpp"
#include "anticonc/harness.hpp"
#include "anticonc/random_matrix.hpp"
#include "anticonc/spin_glass.hpp"
#include "oracles.hpp"

using namespace anticonc;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  failures += !o.pass;
  std::printf("[%s] %d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

PointSet<double> gaussian_points(int n, std::uint64_t seed) {
  CounterRng rng = seed_stream(seed, 0, 0);
  PointSet<double> p(2, n);
  for (auto& x : p.reshaped()) x = rng.normal();
  return p;
}

Outcome coupling_inequality() {
  const auto t0 = Clock::now();
  CounterRng rng = seed_stream(1, 0, 0);
  int violations = 0;
  double worst = -1;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    std::vector<double> v(5);
    for (double& x : v) x = rng.uniform();
    std::sort(v.begin(), v.end());
    const double e = oracle::coupling_excess(oracle::random_joint(5, t, rng), v);
    worst = std::max(worst, e);
    violations += e > 1e-12;
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < 10.0,
          fmt("1000 tables, %d violations, max excess %.3g, %.2f s", violations, worst, secs)};
}

Outcome bernoulli() {
  const auto t0 = Clock::now();
  ExperimentConfig c;
  c.model = Model::Bernoulli;
  c.n = 400;
  c.alpha = 0.3;
  c.samples = 100000;
  c.delta_multiplier = 0.1;  // delta = 0.1 sqrt(400) = alpha sqrt(n) / 3
  c.seed = 2;
  const auto r = run(c).report;
  const double eps = 0.3 / 20.0;
  const double exact_tv = bernoulli_exact_tv(400, eps);
  const double hell = uniform_product_tv_bound(bernoulli_affinity(eps), 400);
  const bool a = exact_tv <= hell;
  const bool b = r.certificate.bound <= 11.0 / 12 + 0.02 && std::abs(r.certificate.delta - 2.0) < 1e-12;
  const bool cc = r.concentration.value <= r.certificate.bound + 2 * r.certificate.p_close_slack;
  const double secs = seconds_since(t0);
  return {a && b && cc && secs < 30.0,
          fmt("exact tv %.6f <= hellinger %.6f; bound %.6f at delta %.3g (limit %.6f); concentration %.6f <= %.6f",
              exact_tv, hell, r.certificate.bound, r.certificate.delta, 11.0 / 12 + 0.02, r.concentration.value,
              r.certificate.bound + 2 * r.certificate.p_close_slack)};
}

Outcome quadratic_law() {
  const double grid[] = {0.005, 0.01, 0.02, 0.04};
  bool ok = true;
  std::string detail;
  double worst_cf = 0;
  for (auto name : {kStdGaussian, kExponential}) {
    const Density1D f = standard_density(name);
    double lo = 1e300, hi = 0;
    for (double eps : grid) {
      const double rho = scaled_affinity(f, eps).rho;
      worst_cf = std::max(worst_cf, std::abs(rho - *scaled_affinity_closed_form(name, eps)));
      const double c = (1 - rho) / (eps * eps);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    ok = ok && hi / lo - 1 <= 0.10;
    detail += fmt("%s variation %.2f%%; ", std::string(name).c_str(), 100 * (hi / lo - 1));
  }
  ok = ok && worst_cf <= 1e-7;
  return {ok, detail + fmt("max |quadrature - closed form| %.2g", worst_cf)};
}

Outcome homogeneity() {
  int failures_h = 0, total = 0;
  const double lam = 1 / (1 + 0.5 / std::sqrt(10.0));
  auto rel = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); };
  for (int t = 0; t < 50; ++t) {
    const auto p = gaussian_points(10, 100 + t);
    const PointSet<double> q = lam * p;
    failures_h += !rel(tsp_exact(q).value, lam * tsp_exact(p).value);
    failures_h += !rel(matching_exact(q).value, lam * matching_exact(p).value);
    failures_h += !rel(nn_sum(q).value, lam * nn_sum(p).value);
    total += 3;
  }
  const Density1D g = standard_density(kStdGaussian);
  for (int t = 0; t < 50; ++t) {
    const auto spec = t % 2 ? MatrixEnsembleSpec::wigner(8) : MatrixEnsembleSpec::covariance(20, 80);
    failures_h += !scaling_shift_check(spec, sample_inputs(spec, g, SeedStream(200, t)), 0.5).exact;
    ++total;
  }
  return {failures_h == 0, fmt("%d checks (tsp, matching, nn-sum, log det shift), %d failures", total, failures_h)};
}

Outcome solver_oracles() {
  int mism = 0;
  const Density1D e = standard_density(kExponential);
  for (int t = 0; t < 100; ++t) {
    const Eigen::MatrixXd cm = sample_costs(1 + t % 8, e, SeedStream(300, t));
    mism += std::abs(hungarian(cm).cost - oracle::brute_assignment(cm)) > 1e-12;
  }
  for (int t = 0; t < 50; ++t) {
    const auto p = gaussian_points(3 + t % 5, 400 + t);
    mism += std::abs(tsp_exact(p).value - oracle::brute_tsp(p)) > 1e-12;
  }
  for (int t = 0; t < 40; ++t) {
    const auto p = gaussian_points(2 + 2 * (t % 4), 500 + t);
    mism += std::abs(matching_exact(p).value - oracle::brute_matching(p)) > 1e-12;
  }
  for (int t = 0; t < 50; ++t) {
    CounterRng rng = seed_stream(600, t, 0);
    Eigen::VectorXd w(static_cast<Eigen::Index>(FppGrid::edge_count(3, 3)));
    for (auto& x : w) x = rng.exponential() + 1e-3;
    const FppGrid g(3, 3, w, {0, static_cast<int>(t % 3)}, {2, static_cast<int>((t / 3) % 3)});
    mism += std::abs(passage_time(g).passage_time - oracle::brute_passage_time(g)) > 1e-12;
  }
  int sk = 0;
  for (int n = 2; n <= 12; ++n) {
    for (int t = 0; t < 5; ++t) {
      const auto d = SKDisorder::gaussian(n, SeedStream(700 + n, t));
      const auto fast = free_energy(d, 1.0);
      const auto slow = oracle::naive_sk(d, 1.0);
      mism += std::abs(fast.free_energy - slow.free_energy) > 1e-10 * std::max(1.0, std::abs(slow.free_energy));
      mism += std::abs(fast.ground_state - slow.max_h) > 1e-12 * std::max(1.0, std::abs(slow.max_h));
      ++sk;
    }
  }
  return {mism == 0, fmt("hungarian 100, held-karp 50, matching 40, dijkstra 50, sk %d; %d mismatches", sk, mism)};
}

Outcome per_sample() {
  int jensen_bad = 0, gs_bad = 0;
  for (double beta : {0.5, 1.5}) {
    for (int t = 0; t < 500; ++t) {
      const auto d = SKDisorder::gaussian(16, SeedStream(800, t));
      const auto j = jensen_gap_check(d, 0.5, beta);
      jensen_bad += !j.holds;
      const double f = scale_disorder(d, 0.5).factor;
      gs_bad += std::abs(j.scaled.ground_state - f * j.base.ground_state) > 1e-12 * std::abs(j.scaled.ground_state);
    }
  }
  int ttq_bad = 0;
  const Density1D e = standard_density(kExponential);
  for (int seed = 0; seed < 100; ++seed) {
    const FppGrid g = make_box(16, e, SeedStream(900, seed));
    const auto sched = graded_schedule(g, 0.5, 16.0);
    const auto geo = passage_time(g);
    const double Tp = passage_time(perturb(g, sched)).passage_time;
    ttq_bad += geo.passage_time - Tp < ttq_lower_bound(geo, g, sched, 8) - 1e-10;
  }
  int asg_bad = 0;
  for (int seed = 0; seed < 200; ++seed) {
    const auto gc = gap_certificate(sample_costs(50, e, SeedStream(1000, seed)), 0.5);
    asg_bad += !gc.holds || !gc.entrywise_holds || gc.C_prime > gc.C;
  }
  int det_bad = 0;
  const Density1D g = standard_density(kStdGaussian);
  for (int t = 0; t < 50; ++t) {
    const auto spec = MatrixEnsembleSpec::covariance(20, 80);
    det_bad += !scaling_shift_check(spec, sample_inputs(spec, g, SeedStream(1100, t)), 0.5).exact;
  }
  const int total = jensen_bad + gs_bad + ttq_bad + asg_bad + det_bad;
  return {total == 0, fmt("jensen %d/1000, ttq %d/100, assignment %d/200, ground state %d/1000, log det %d/50 violations",
                          jensen_bad, ttq_bad, asg_bad, gs_bad, det_bad)};
}

Outcome nontrivial() {
  struct Case {
    Model model;
    std::size_t n, p;
  };
  const Case cases[] = {{Model::SkFreeEnergy, 16, 0},
                        {Model::Assignment, 50, 0},
                        {Model::MatrixCovariance, 80, 20},
                        {Model::FppGraded, 32, 0}};
  bool ok = true;
  std::string detail;
  for (const Case& k : cases) {
    const auto t0 = Clock::now();
    ExperimentConfig c;
    c.model = k.model;
    c.n = k.n;
    c.p = k.p;
    c.delta_multiplier = 0.1;
    c.seed = 3;
    const auto r = run(c).report;
    const double secs = seconds_since(t0);
    ok = ok && r.certificate.bound <= 0.98 && secs < 300.0;
    detail += fmt("%s %.4f (delta %.4g, %.1f s); ", std::string(to_string(k.model)).c_str(), r.certificate.bound,
                  r.certificate.delta, secs);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome assignment_numerics() {
  CounterRng rng = seed_stream(1200, 0, 0);
  double worst = 0;
  for (int k = 0; k < 10000; ++k) {
    const double n = 1 + double(rng.below(500));
    const double alpha = rng.uniform();
    const double y = rng.uniform() < 0.5 ? rng.uniform() / n : 10 * rng.uniform();
    worst = std::max(worst, std::abs(invert_perturbation(y + alpha / n * phi(y, n), alpha, n) - y));
  }
  const Density1D e = standard_density(kExponential);
  const std::size_t n = 50;
  const double p = row_min_probability(e, n);
  int hits = 0;
  const int seeds = 10000;
  for (int s = 0; s < seeds; ++s) {
    CounterRng r = seed_stream(1300, s, 0);
    double mn = 1e300;
    for (std::size_t j = 0; j < n; ++j) mn = std::min(mn, e.sample(r));
    hits += mn >= 1.0 / n;
  }
  const double sd = std::sqrt(p * (1 - p) / seeds);
  const double z = (double(hits) / seeds - p) / sd;
  return {worst <= 1e-12 && std::abs(z) <= 4,
          fmt("max round-trip residual %.2g; row-min frequency %.4f vs %.4f (%.2f sigma)", worst, double(hits) / seeds, p,
              z)};
}

Outcome determinism() {
  int differ = 0;
  for (Model m : all_models()) {
    ExperimentConfig c;
    c.model = m;
    c.samples = 200;
    c.seed = 11;
    c.sweep = true;
    if (m == Model::FppGraded || m == Model::FppCorridor) c.n = 16;
    auto a = to_json(run(c).report);
    c.threads = 1;
    auto b = to_json(run(c).report);
    a["meta"].erase("wall_clock_seconds");
    b["meta"].erase("wall_clock_seconds");
    differ += a.dump() != b.dump();
  }
  return {differ == 0, fmt("%zu models re-run, %d differ", all_models().size(), differ)};
}

}  // namespace

int main() {
  report(1, "coupling inequality oracle", coupling_inequality);
  report(2, "bernoulli end-to-end", bernoulli);
  report(3, "quadratic affinity law", quadratic_law);
  report(4, "homogeneity identities", homogeneity);
  report(5, "solver oracles", solver_oracles);
  report(6, "per-sample inequalities", per_sample);
  report(7, "certificate nontriviality", nontrivial);
  report(8, "assignment inversion and row minimum", assignment_numerics);
  report(9, "determinism", determinism);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
