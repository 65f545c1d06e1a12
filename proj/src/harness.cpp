#include "anticonc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include "anticonc/assignment.hpp"
#include "anticonc/densities.hpp"
#include "anticonc/errors.hpp"
#include "anticonc/euclidean.hpp"
#include "anticonc/fpp.hpp"
#include "anticonc/random_matrix.hpp"
#include "anticonc/spin_glass.hpp"

#ifndef ANTICONC_VERSION
#define ANTICONC_VERSION "0.0.0"
#endif

namespace anticonc {

namespace {

struct ModelName {
  Model model;
  std::string_view name;
};

constexpr ModelName kModelNames[] = {
    {Model::Bernoulli, "bernoulli"},
    {Model::EuclideanTsp, "euclidean-tsp"},
    {Model::EuclideanMatching, "euclidean-matching"},
    {Model::EuclideanRhee, "euclidean-rhee"},
    {Model::SkFreeEnergy, "sk-free-energy"},
    {Model::SkGroundState, "sk-ground-state"},
    {Model::FppGraded, "fpp-graded"},
    {Model::FppCorridor, "fpp-corridor"},
    {Model::Assignment, "assignment"},
    {Model::MatrixWigner, "matrix-wigner"},
    {Model::MatrixCovariance, "matrix-covariance"},
};

constexpr std::string_view kBernoulliLaw = "bernoulli-1/2";
constexpr std::string_view kUniformSquare = "uniform-square";

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const char* b = value.data();
  const char* e = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(b, e, out);
  if (ec != std::errc() || ptr != e) {
    throw ConfigError("setting '" + std::string(key) + "': cannot parse '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw ConfigError("setting '" + std::string(key) + "': expected a boolean, got '" + std::string(value) + "'");
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool is_euclidean(Model m) {
  return m == Model::EuclideanTsp || m == Model::EuclideanMatching || m == Model::EuclideanRhee;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

std::string_view to_string(Model model) {
  for (const auto& [m, name] : kModelNames)
    if (m == model) return name;
  return "unknown";
}

Model model_from_string(std::string_view name) {
  for (const auto& [m, n] : kModelNames)
    if (n == name) return m;
  throw ConfigError("unknown model '" + std::string(name) + "'");
}

const std::vector<Model>& all_models() {
  static const std::vector<Model> models = [] {
    std::vector<Model> out;
    for (const auto& [m, name] : kModelNames) out.push_back(m);
    return out;
  }();
  return models;
}

ExperimentConfig ExperimentConfig::resolved() const {
  ExperimentConfig c = *this;
  switch (model) {
    case Model::Bernoulli:
      if (c.n == 0) c.n = 400;
      if (c.density.empty()) c.density = kBernoulliLaw;
      break;
    case Model::EuclideanTsp:
      if (c.n == 0) c.n = 10;
      if (c.functional.empty()) c.functional = "tsp-exact";
      if (c.density.empty()) c.density = kStdGaussian;
      break;
    case Model::EuclideanMatching:
      if (c.n == 0) c.n = 10;
      if (c.functional.empty()) c.functional = "matching-exact";
      if (c.density.empty()) c.density = kStdGaussian;
      break;
    case Model::EuclideanRhee:
      if (c.n == 0) c.n = 12;
      if (c.functional.empty()) c.functional = "tsp-exact";
      if (c.density.empty()) c.density = kUniformSquare;
      break;
    case Model::SkFreeEnergy:
    case Model::SkGroundState:
      if (c.n == 0) c.n = 16;
      if (c.density.empty()) c.density = kStdGaussian;
      break;
    case Model::FppGraded:
    case Model::FppCorridor:
      if (c.n == 0) c.n = 32;
      if (c.density.empty()) c.density = kExponential;
      if (model == Model::FppGraded && c.m == 0) c.m = c.n / 2;
      break;
    case Model::Assignment:
      if (c.n == 0) c.n = 50;
      if (c.density.empty()) c.density = kExponential;
      break;
    case Model::MatrixWigner:
      if (c.n == 0) c.n = 8;
      if (c.density.empty()) c.density = kStdGaussian;
      break;
    case Model::MatrixCovariance:
      if (c.n == 0) c.n = 80;
      if (c.p == 0) c.p = 20;
      if (c.density.empty()) c.density = kStdGaussian;
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  const ExperimentConfig c = resolved();
  require(c.samples >= 100, "samples must be >= 100");
  require(c.samples <= 100000000, "samples must be <= 1e8");
  require(c.confidence > 0.5 && c.confidence < 1.0, "confidence must lie in (0.5, 1)");
  require(c.delta_multiplier >= 0.0 && std::isfinite(c.delta_multiplier), "delta multiplier must be >= 0");
  require(c.alpha >= 0.0 && std::isfinite(c.alpha), "alpha must be >= 0");
  require(c.beta >= 0.0 && std::isfinite(c.beta), "beta must be >= 0");
  require(c.samples < (std::uint64_t{1} << 32), "samples must be below 2^32");
  const double n = static_cast<double>(c.n);
  const bool has_law = c.density != kBernoulliLaw && c.density != kUniformSquare;
  std::optional<Density1D> law;
  if (has_law) law = standard_density(c.density);
  if (c.model != Model::MatrixCovariance) require(c.p == 0, "--p only applies to matrix-covariance");
  if (!is_euclidean(c.model)) require(c.functional.empty(), "--functional only applies to euclidean models");

  switch (c.model) {
    case Model::Bernoulli:
      require(c.density == kBernoulliLaw, "bernoulli takes no density");
      if (c.n > 10000000) throw SizeError("bernoulli: n must be <= 1e7");
      require(c.alpha / std::sqrt(n) < 1.0, "bernoulli: alpha / sqrt(n) must be < 1");
      break;
    case Model::EuclideanTsp:
    case Model::EuclideanMatching: {
      const FunctionalKind kind = functional_from_string(c.functional);
      if (c.model == Model::EuclideanMatching) {
        require(kind == FunctionalKind::MatchingExact, "euclidean-matching uses the matching-exact functional");
      } else {
        require(kind != FunctionalKind::MatchingExact, "euclidean-tsp does not take matching-exact");
      }
      if (kind == FunctionalKind::TspExact && (c.n < 3 || c.n > 15)) throw SizeError("tsp-exact: n in [3, 15]");
      if (kind == FunctionalKind::Tsp2Opt && (c.n < 3 || c.n > 2000)) throw SizeError("tsp-2opt: n in [3, 2000]");
      if (kind == FunctionalKind::NnSum && (c.n < 2 || c.n > 5000)) throw SizeError("nn-sum: n in [2, 5000]");
      if (kind == FunctionalKind::MatchingExact && (c.n < 2 || c.n > 16 || c.n % 2 != 0)) {
        throw SizeError("matching-exact: even n in [2, 16]");
      }
      require(c.alpha / std::sqrt(n) < 0.5, "euclidean: alpha / sqrt(n) must be < 1/2");
      break;
    }
    case Model::EuclideanRhee: {
      require(c.density == kUniformSquare, "euclidean-rhee draws uniform points; no density option");
      const FunctionalKind kind = functional_from_string(c.functional);
      require(kind == FunctionalKind::TspExact || kind == FunctionalKind::MatchingExact,
              "euclidean-rhee needs an exact functional (tsp-exact or matching-exact)");
      if (c.n < 8) throw SizeError("euclidean-rhee: n must be >= 8");
      if (kind == FunctionalKind::TspExact && c.n > 15) throw SizeError("tsp-exact: n in [3, 15]");
      if (kind == FunctionalKind::MatchingExact && (c.n > 16 || c.n % 2 != 0)) {
        throw SizeError("matching-exact: even n in [2, 16]");
      }
      require(c.alpha < 1.0, "euclidean-rhee: alpha must be < 1");
      require(c.beta / std::sqrt(n) < 1.0, "euclidean-rhee: beta / sqrt(n) must be < 1");
      break;
    }
    case Model::SkFreeEnergy:
    case Model::SkGroundState:
      require(c.density == kStdGaussian, "SK couplings are std-gaussian");
      if (c.n < 2 || c.n > static_cast<std::size_t>(kSkMaxSpins)) throw SizeError("SK: n in [2, 20]");
      require(c.alpha / n < 0.5, "SK: alpha / n must be < 1/2");
      break;
    case Model::FppGraded:
    case Model::FppCorridor:
      require(law->half_line(), "fpp: edge weights need a half-line density");
      if (c.n < 6 || c.n > 256 || c.n % 2 != 0) throw SizeError("fpp: box parameter n must be even, in [6, 256]");
      if (c.model == Model::FppGraded) {
        require(c.m <= c.n, "fpp-graded: m must not exceed the source-target distance");
        require(c.alpha / std::sqrt(std::log(n)) < 0.5, "fpp-graded: alpha / sqrt(log n) must be < 1/2");
      } else {
        require(c.slack > 0.0, "fpp-corridor: slack must be > 0");
        require(c.alpha * std::pow(n, -0.875 - c.slack) < 0.5, "fpp-corridor: eps must be < 1/2");
      }
      break;
    case Model::Assignment:
      require(law->half_line(), "assignment: costs need a half-line density");
      if (c.n < 1 || c.n > 500) throw SizeError("assignment: n in [1, 500]");
      require(c.alpha / n < 0.5, "assignment: alpha / n must be < 1/2");
      break;
    case Model::MatrixWigner:
      if (c.n < 1 || c.n > 512) throw SizeError("matrix-wigner: N in [1, 512]");
      require(c.alpha / std::sqrt(n * (n + 1) / 2.0) < 0.5, "matrix-wigner: alpha n_inputs^{-1/2} must be < 1/2");
      break;
    case Model::MatrixCovariance:
      if (c.p < 1 || c.p + 1 > c.n) throw SizeError("matrix-covariance: need 1 <= p <= n - 1");
      if (c.n * c.p > 1000000) throw SizeError("matrix-covariance: n p must be <= 1e6");
      require(c.alpha / std::sqrt(n * static_cast<double>(c.p)) < 0.5,
              "matrix-covariance: alpha (np)^{-1/2} must be < 1/2");
      break;
  }
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "model") {
    cfg.model = model_from_string(value);
  } else if (key == "n") {
    cfg.n = parse_number<std::size_t>(key, value);
  } else if (key == "p") {
    cfg.p = parse_number<std::size_t>(key, value);
  } else if (key == "alpha") {
    cfg.alpha = parse_number<double>(key, value);
  } else if (key == "beta") {
    cfg.beta = parse_number<double>(key, value);
  } else if (key == "delta-mult" || key == "delta_mult" || key == "delta_multiplier") {
    cfg.delta_multiplier = parse_number<double>(key, value);
  } else if (key == "samples") {
    cfg.samples = parse_number<std::size_t>(key, value);
  } else if (key == "confidence") {
    cfg.confidence = parse_number<double>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "density") {
    cfg.density = std::string(value);
  } else if (key == "functional") {
    cfg.functional = std::string(value);
  } else if (key == "slack") {
    cfg.slack = parse_number<double>(key, value);
  } else if (key == "m") {
    cfg.m = parse_number<std::size_t>(key, value);
  } else if (key == "sweep") {
    cfg.sweep = parse_bool(key, value);
  } else if (key == "threads") {
    cfg.threads = parse_number<unsigned>(key, value);
  } else if (key == "report") {
    cfg.report_path = std::string(value);
  } else if (key == "dump-csv" || key == "dump_csv") {
    cfg.csv_path = std::string(value);
  } else {
    throw ConfigError("unknown setting '" + std::string(key) + "'");
  }
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v = line;
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    out[std::string(trim(v.substr(0, eq)))] = std::string(trim(v.substr(eq + 1)));
  }
  return out;
}

double fluctuation_scale(const ExperimentConfig& cfg) {
  const double n = static_cast<double>(cfg.n);
  switch (cfg.model) {
    case Model::Bernoulli:
      return std::sqrt(n);
    case Model::EuclideanTsp:
    case Model::EuclideanMatching:
    case Model::EuclideanRhee:
    case Model::SkFreeEnergy:
    case Model::SkGroundState:
      return 1.0;
    case Model::FppGraded:
      return std::sqrt(std::log(n));
    case Model::FppCorridor:
      return std::pow(n, 0.125 - cfg.slack);
    case Model::Assignment:
      return 1.0 / std::sqrt(n);
    case Model::MatrixWigner:
      return n / std::sqrt(n * (n + 1) / 2.0);
    case Model::MatrixCovariance:
      return std::sqrt(static_cast<double>(cfg.p) / n);
  }
  return 1.0;
}

namespace {

struct Outcome {
  double x = 0.0;
  double y = 0.0;
  std::size_t checks = 0;
  std::vector<std::string> violations;
  std::vector<std::pair<std::string, double>> stats;
  double tv = 0.0;        // replicate-dependent TV bound (Rhee)
  double affinity = 1.0;  // replicate-dependent per-coordinate affinity (Rhee)
};

void check(Outcome& o, bool ok, std::size_t r, const std::string& what) {
  ++o.checks;
  if (!ok) o.violations.push_back("replicate " + std::to_string(r) + ": " + what);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

using ReplicateFn = std::function<Outcome(std::size_t)>;

struct Plan {
  ReplicateFn replicate;
  TvDecomposition tv;
  bool tv_per_replicate = false;
};

Plan plan_bernoulli(const ExperimentConfig& c) {
  Plan plan;
  const double eps = c.alpha / std::sqrt(static_cast<double>(c.n));
  plan.tv.per_coordinate_affinity = bernoulli_affinity(eps);
  plan.tv.coordinate_count = static_cast<double>(c.n);
  plan.tv.value = uniform_product_tv_bound(plan.tv.per_coordinate_affinity, plan.tv.coordinate_count);
  plan.tv.method = "hellinger-product";
  plan.replicate = [c](std::size_t r) {
    const BernoulliPair pair = bernoulli_mixing_coupling(c.n, c.alpha, SeedStream(c.seed, r));
    Outcome o;
    o.x = pair.x.cast<double>().sum();
    o.y = pair.x_prime.cast<double>().sum();
    check(o, (pair.x_prime >= pair.x).all(), r, "mixing coupling decreased a coordinate");
    return o;
  };
  return plan;
}

PointSet<double> sample_points(std::size_t n, const Density1D& law, const SeedStream& streams) {
  const Eigen::VectorXd flat = sample_iid(law, 2 * n, streams);
  return Eigen::Map<const PointSet<double>>(flat.data(), 2, static_cast<Eigen::Index>(n));
}

std::uint64_t heuristic_seed(const ExperimentConfig& c, std::size_t r) {
  CounterRng rng = seed_stream(c.seed, r, 0xffffffffu);
  return rng();
}

Plan plan_euclidean(const ExperimentConfig& c) {
  Plan plan;
  const auto law = std::make_shared<Density1D>(standard_density(c.density));
  const FunctionalKind kind = functional_from_string(c.functional);
  const double eps = c.alpha / std::sqrt(static_cast<double>(c.n));
  plan.tv.per_coordinate_affinity = scaled_affinity(*law, eps).rho;
  plan.tv.coordinate_count = 2.0 * static_cast<double>(c.n);
  plan.tv.value = uniform_product_tv_bound(plan.tv.per_coordinate_affinity, plan.tv.coordinate_count);
  plan.tv.method = "scaled-affinity-quadrature";
  const double rho = plan.tv.per_coordinate_affinity;
  plan.replicate = [c, law, kind, rho](std::size_t r) {
    const PointSet<double> pts = sample_points(c.n, *law, SeedStream(c.seed, r));
    const FunctionalOptions opts{heuristic_seed(c, r), 20};
    Outcome o;
    try {
      const ScalingCoupling sc = scaling_coupling(pts, c.alpha, 1.0, kind, rho, opts);
      o.x = sc.L;
      o.y = sc.L_prime_reevaluated;
      check(o, true, r, "");
    } catch (const InternalError& e) {
      check(o, false, r, e.what());
    }
    return o;
  };
  return plan;
}

Plan plan_rhee(const ExperimentConfig& c) {
  Plan plan;
  const FunctionalKind kind = functional_from_string(c.functional);
  plan.tv.coordinate_count = static_cast<double>(c.n - c.n / 2);
  plan.tv.method = c.alpha == 0.0 ? "null-coupling" : "rhee-mixture-conservative-max";
  plan.tv_per_replicate = c.alpha != 0.0;
  plan.replicate = [c, kind](std::size_t r) {
    Outcome o;
    const SeedStream streams(c.seed, r);
    if (c.alpha == 0.0) {
      PointSet<double> pts(2, static_cast<Eigen::Index>(c.n));
      for (Eigen::Index i = 0; i < pts.cols(); ++i) {
        CounterRng rng = streams.stream(static_cast<std::uint64_t>(i));
        pts(0, i) = rng.uniform();
        pts(1, i) = rng.uniform();
      }
      o.x = o.y = evaluate(kind, pts).value;
      check(o, true, r, "");
      return o;
    }
    const RheeSample s = rhee_coupling_sample(c.n, c.alpha, c.beta, streams);
    o.x = evaluate(kind, s.x).value;
    o.y = evaluate(kind, s.x_prime).value;
    const double surgery = rhee_surgery_bound(s, 0.0);
    check(o, std::abs(o.x - o.y) <= surgery + 1e-12 * std::max(1.0, o.x), r,
          "|L - L'| = " + fmt(std::abs(o.x - o.y)) + " exceeds the surgery bound " + fmt(surgery));
    o.tv = s.coupling.tv_bound;
    o.affinity = s.coupling.conservative_affinity;
    o.stats = {{"vol_D_mean", s.coupling.vol_D_estimate},
               {"resampled_mean", static_cast<double>(s.coupling.resample_indices.size())}};
    return o;
  };
  return plan;
}

Plan plan_sk(const ExperimentConfig& c) {
  Plan plan;
  const int n = static_cast<int>(c.n);
  const double factor = 1.0 / (1.0 - c.alpha / static_cast<double>(n));
  plan.tv.per_coordinate_affinity =
      c.alpha == 0.0 ? 1.0 : scaled_affinity(standard_density(kStdGaussian), factor - 1.0).rho;
  plan.tv.coordinate_count = static_cast<double>(n) * (n - 1) / 2.0;
  plan.tv.value = uniform_product_tv_bound(plan.tv.per_coordinate_affinity, plan.tv.coordinate_count);
  plan.tv.method = "scaled-affinity-quadrature";
  const bool ground = c.model == Model::SkGroundState;
  plan.replicate = [c, n, factor, ground](std::size_t r) {
    const SKDisorder dis = SKDisorder::gaussian(n, SeedStream(c.seed, r));
    const JensenCheck jc = jensen_gap_check(dis, c.alpha, c.beta);
    Outcome o;
    check(o, jc.holds, r, "Jensen gap: F~ - F = " + fmt(jc.lhs) + " < " + fmt(jc.rhs));
    const double G = jc.base.ground_state;
    const double G_scaled = jc.scaled.ground_state;
    check(o, std::abs(G_scaled - factor * G) <= 1e-12 * std::max(1.0, std::abs(G)), r,
          "ground state scaling: G~ = " + fmt(G_scaled) + ", G/(1 - alpha/n) = " + fmt(factor * G));
    if (ground) {
      o.x = G;
      o.y = G_scaled;
    } else {
      o.x = jc.base.free_energy;
      o.y = jc.scaled.free_energy;
    }
    o.stats = {{"gibbs_energy_mean", jc.base.gibbs_energy}, {"ground_state_mean", G}};
    return o;
  };
  return plan;
}

Plan plan_fpp(const ExperimentConfig& c) {
  Plan plan;
  const auto law = std::make_shared<Density1D>(standard_density(c.density));
  const int box = static_cast<int>(c.n);
  const double n = static_cast<double>(c.n);
  const int side = 2 * box + 1;
  const FppGrid shape(side, side, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(FppGrid::edge_count(side, side))),
                      {box / 2, box}, {3 * box / 2, box});
  const bool graded = c.model == Model::FppGraded;
  const auto sched = std::make_shared<EpsSchedule>(graded ? graded_schedule(shape, c.alpha, n)
                                                          : corridor_schedule(shape, c.alpha, n, c.slack));
  std::size_t active = 0;
  for (Eigen::Index e = 0; e < sched->values.size(); ++e) active += sched->values[e] > 0.0;
  const double log_rho = schedule_log_affinity(*sched, *law);
  plan.tv.value = tv_from_log_affinity(log_rho);
  plan.tv.coordinate_count = static_cast<double>(active);
  plan.tv.per_coordinate_affinity = active == 0 ? 1.0 : std::exp(log_rho / static_cast<double>(active));
  plan.tv.method = graded ? "graded-product-affinity" : "corridor-product-affinity";
  const std::size_t m = c.m;
  plan.replicate = [c, law, sched, box, graded, m](std::size_t r) {
    const FppGrid grid = make_box(box, *law, SeedStream(c.seed, r));
    const GeodesicResult geo = passage_time(grid);
    const GeodesicResult geo2 = passage_time(perturb(grid, *sched));
    Outcome o;
    o.x = geo.passage_time;
    o.y = geo2.passage_time;
    check(o, o.y <= o.x + 1e-12 * o.x, r, "T' = " + fmt(o.y) + " exceeds T = " + fmt(o.x));
    o.stats = {{"boundary_touch_fraction", geo.touches_boundary ? 1.0 : 0.0}};
    if (graded) {
      const double bound = ttq_lower_bound(geo, grid, *sched, std::min(m, geo.edge_list.size()));
      check(o, o.x - o.y >= bound - 1e-10, r, "T - T' = " + fmt(o.x - o.y) + " below the lower bound " + fmt(bound));
    } else {
      const CorridorCheck cc = corridor_check(geo, *sched, o.y);
      check(o, cc.holds, r, "contained geodesic but T' = " + fmt(o.y) + " > T/(1+eps) = " + fmt(cc.ceiling));
      o.stats.emplace_back("corridor_contained_fraction", cc.contained ? 1.0 : 0.0);
    }
    return o;
  };
  return plan;
}

Plan plan_assignment(const ExperimentConfig& c) {
  Plan plan;
  const auto law = std::make_shared<Density1D>(standard_density(c.density));
  const double n = static_cast<double>(c.n);
  plan.tv.per_coordinate_affinity = perturbation_affinity(*law, c.alpha, n).rho;
  plan.tv.coordinate_count = n * n;
  plan.tv.value = uniform_product_tv_bound(plan.tv.per_coordinate_affinity, plan.tv.coordinate_count);
  plan.tv.method = "phi-perturbation-quadrature";
  plan.replicate = [c, law](std::size_t r) {
    const Eigen::MatrixXd cm = sample_costs(c.n, *law, SeedStream(c.seed, r));
    const GapCertificate g = gap_certificate(cm, c.alpha);
    Outcome o;
    o.x = g.C;
    o.y = g.C_prime;
    check(o, g.holds, r, "C - C' = " + fmt(g.C - g.C_prime) + " below " + fmt(g.lower_bound));
    check(o, g.entrywise_holds, r, "entrywise gap bound failed on a row of A");
    check(o, g.C_prime <= g.C + 1e-12 * g.C, r, "C' exceeds C");
    o.stats = {{"A_size_mean", static_cast<double>(g.A_size)}};
    return o;
  };
  return plan;
}

Plan plan_matrix(const ExperimentConfig& c) {
  Plan plan;
  const auto law = std::make_shared<Density1D>(standard_density(c.density));
  const MatrixEnsembleSpec spec = c.model == Model::MatrixWigner
                                      ? MatrixEnsembleSpec::wigner(static_cast<int>(c.n))
                                      : MatrixEnsembleSpec::covariance(static_cast<int>(c.p), c.n);
  const double eps = c.alpha / std::sqrt(static_cast<double>(spec.n_inputs));
  plan.tv.per_coordinate_affinity = eps == 0.0 ? 1.0 : scaled_affinity(*law, eps).rho;
  plan.tv.coordinate_count = static_cast<double>(spec.n_inputs);
  plan.tv.value = uniform_product_tv_bound(plan.tv.per_coordinate_affinity, plan.tv.coordinate_count);
  plan.tv.method = "scaled-affinity-quadrature";
  plan.replicate = [c, law, spec](std::size_t r) {
    const Eigen::VectorXd inputs = sample_inputs(spec, *law, SeedStream(c.seed, r));
    const ShiftCheck<double> sc = scaling_shift_check(spec, inputs, c.alpha);
    Outcome o;
    o.x = sc.L;
    o.y = sc.L_prime;
    check(o, sc.exact, r,
          "log-det shift: L - L' = " + fmt(sc.L - sc.L_prime) + ", r N log(1+eps) = " + fmt(sc.shift));
    return o;
  };
  return plan;
}

Plan make_plan(const ExperimentConfig& c) {
  switch (c.model) {
    case Model::Bernoulli:
      return plan_bernoulli(c);
    case Model::EuclideanTsp:
    case Model::EuclideanMatching:
      return plan_euclidean(c);
    case Model::EuclideanRhee:
      return plan_rhee(c);
    case Model::SkFreeEnergy:
    case Model::SkGroundState:
      return plan_sk(c);
    case Model::FppGraded:
    case Model::FppCorridor:
      return plan_fpp(c);
    case Model::Assignment:
      return plan_assignment(c);
    case Model::MatrixWigner:
    case Model::MatrixCovariance:
      return plan_matrix(c);
  }
  throw InternalError("unhandled model");
}

std::vector<Outcome> run_replicates(const ReplicateFn& fn, std::size_t samples, unsigned threads) {
  std::vector<Outcome> out(samples);
  std::vector<std::exception_ptr> errors(samples);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= samples || failed.load()) return;
      try {
        out[r] = fn(r);
      } catch (...) {
        errors[r] = std::current_exception();
        failed.store(true);
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads == 0 ? hw : threads, samples));
  if (count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

GapStats gap_stats(const std::vector<double>& x, const std::vector<double>& y) {
  GapStats g;
  const std::size_t n = x.size();
  std::vector<double> gaps(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    gaps[i] = x[i] - y[i];
    sum += gaps[i];
    if (std::abs(gaps[i]) < std::abs(gaps[g.witness_replicate])) g.witness_replicate = i;
  }
  g.witness_x = x[g.witness_replicate];
  g.witness_y = y[g.witness_replicate];
  g.mean = sum / static_cast<double>(n);
  std::vector<double> sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  g.min = sorted.front();
  g.max = sorted.back();
  g.median = n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return g;
}

std::vector<std::uint8_t> close_indicators(const std::vector<double>& x, const std::vector<double>& y, double delta) {
  std::vector<std::uint8_t> close(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) close[i] = std::abs(x[i] - y[i]) <= delta ? 1 : 0;
  return close;
}

}  // namespace

Experiment run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  const ExperimentConfig c = config.resolved();
  const Plan plan = make_plan(c);
  const std::vector<Outcome> outcomes = run_replicates(plan.replicate, c.samples, c.threads);

  Experiment exp;
  ExperimentReport& rep = exp.report;
  rep.config = c;
  rep.version = ANTICONC_VERSION;
  rep.fluctuation_scale = fluctuation_scale(c);
  rep.tv = plan.tv;
  exp.x.reserve(c.samples);
  exp.y.reserve(c.samples);
  std::map<std::string, double> stat_sums;
  double tv_max = 0.0, affinity_min = 1.0;
  for (const Outcome& o : outcomes) {
    exp.x.push_back(o.x);
    exp.y.push_back(o.y);
    rep.violations.checks += o.checks;
    rep.violations.count += o.violations.size();
    for (const auto& v : o.violations) {
      if (rep.violations.details.size() < 20) rep.violations.details.push_back(v);
    }
    for (const auto& [k, v] : o.stats) stat_sums[k] += v;
    tv_max = std::max(tv_max, o.tv);
    affinity_min = std::min(affinity_min, o.affinity);
  }
  for (const auto& [k, v] : stat_sums) rep.statistics[k] = v / static_cast<double>(c.samples);
  if (plan.tv_per_replicate) {
    rep.tv.value = tv_max;
    rep.tv.per_coordinate_affinity = affinity_min;
  }
  if (c.model == Model::Bernoulli && c.n <= 100000) {
    rep.statistics["exact_tv"] = bernoulli_exact_tv(c.n, c.alpha / std::sqrt(static_cast<double>(c.n)));
  }
  if (c.model == Model::FppCorridor) {
    const int side = 2 * static_cast<int>(c.n) + 1;
    const FppGrid shape(side, side, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(FppGrid::edge_count(side, side))),
                        {static_cast<int>(c.n) / 2, static_cast<int>(c.n)},
                        {3 * static_cast<int>(c.n) / 2, static_cast<int>(c.n)});
    const EpsSchedule s = corridor_schedule(shape, c.alpha, static_cast<double>(c.n), c.slack);
    rep.statistics["corridor_width"] = s.corridor_width;
    rep.statistics["corridor_clipped"] = s.clipped ? 1.0 : 0.0;
  }

  rep.gaps = gap_stats(exp.x, exp.y);
  const double delta = c.delta_multiplier * rep.fluctuation_scale;
  rep.certificate = certify(close_indicators(exp.x, exp.y, delta), rep.tv.value, c.confidence, delta);

  std::vector<double> sorted = exp.x;
  std::sort(sorted.begin(), sorted.end());
  rep.concentration.delta = delta;
  rep.concentration.value = empirical_concentration_function(sorted, delta);
  rep.concentration.bound_plus_slack = rep.certificate.bound + 2.0 * rep.certificate.p_close_slack;
  rep.concentration.within_bound = rep.concentration.value <= rep.concentration.bound_plus_slack;

  if (c.sweep) {
    for (double mult : kSweepMultipliers) {
      const double d = mult * rep.fluctuation_scale;
      const CouplingCertificate cc = certify(close_indicators(exp.x, exp.y, d), rep.tv.value, c.confidence, d);
      rep.sweep.push_back({mult, d, cc.p_close_hat, cc.bound, empirical_concentration_function(sorted, d)});
    }
  }
  rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (rep.violations.count > 0) {
    if (!c.report_path.empty()) emit_report(rep, c.report_path);
    std::string msg = std::to_string(rep.violations.count) + " per-sample check(s) failed in " +
                      std::string(to_string(c.model)) + ":";
    for (const auto& d : rep.violations.details) msg += "\n  " + d;
    throw ViolationError(msg);
  }
  return exp;
}

namespace {

nlohmann::json config_json(const ExperimentConfig& c) {
  return {{"model", std::string(to_string(c.model))},
          {"n", c.n},
          {"p", c.p},
          {"alpha", c.alpha},
          {"beta", c.beta},
          {"delta_multiplier", c.delta_multiplier},
          {"samples", c.samples},
          {"confidence", c.confidence},
          {"seed", c.seed},
          {"density", c.density},
          {"functional", c.functional},
          {"slack", c.slack},
          {"m", c.m},
          {"sweep", c.sweep}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.model = model_from_string(j.at("model").get<std::string>());
  j.at("n").get_to(c.n);
  j.at("p").get_to(c.p);
  j.at("alpha").get_to(c.alpha);
  j.at("beta").get_to(c.beta);
  j.at("delta_multiplier").get_to(c.delta_multiplier);
  j.at("samples").get_to(c.samples);
  j.at("confidence").get_to(c.confidence);
  j.at("seed").get_to(c.seed);
  j.at("density").get_to(c.density);
  j.at("functional").get_to(c.functional);
  j.at("slack").get_to(c.slack);
  j.at("m").get_to(c.m);
  j.at("sweep").get_to(c.sweep);
  return c;
}

bool same_config(const ExperimentConfig& a, const ExperimentConfig& b) {
  return config_json(a) == config_json(b);
}

}  // namespace

nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json sweep = nlohmann::json::array();
  for (const auto& s : r.sweep) {
    sweep.push_back({{"multiplier", s.multiplier},
                     {"delta", s.delta},
                     {"p_close_hat", s.p_close_hat},
                     {"bound", s.bound},
                     {"concentration", s.concentration}});
  }
  const CouplingCertificate& c = r.certificate;
  return {
      {"config", config_json(r.config)},
      {"gaps",
       {{"min", r.gaps.min},
        {"median", r.gaps.median},
        {"mean", r.gaps.mean},
        {"max", r.gaps.max},
        {"witness", {{"replicate", r.gaps.witness_replicate}, {"x", r.gaps.witness_x}, {"y", r.gaps.witness_y}}}}},
      {"p_close", {{"hat", c.p_close_hat}, {"slack", c.p_close_slack}, {"delta", c.delta}}},
      {"tv_bound",
       {{"value", r.tv.value},
        {"per_coordinate_affinity", r.tv.per_coordinate_affinity},
        {"coordinate_count", r.tv.coordinate_count},
        {"method", r.tv.method}}},
      {"certificate",
       {{"delta", c.delta},
        {"p_close_hat", c.p_close_hat},
        {"p_close_slack", c.p_close_slack},
        {"tv_bound", c.tv_bound},
        {"bound", c.bound},
        {"confidence", c.confidence},
        {"samples", c.samples},
        {"fluctuation_scale", r.fluctuation_scale},
        {"sweep", sweep}}},
      {"concentration",
       {{"delta", r.concentration.delta},
        {"value", r.concentration.value},
        {"bound_plus_slack", r.concentration.bound_plus_slack},
        {"within_bound", r.concentration.within_bound}}},
      {"violations",
       {{"count", r.violations.count}, {"checks", r.violations.checks}, {"details", r.violations.details}}},
      {"meta",
       {{"wall_clock_seconds", r.wall_clock_seconds}, {"version", r.version}, {"statistics", r.statistics}}},
  };
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport r;
  try {
    r.config = config_from_json(j.at("config"));
    const auto& g = j.at("gaps");
    g.at("min").get_to(r.gaps.min);
    g.at("median").get_to(r.gaps.median);
    g.at("mean").get_to(r.gaps.mean);
    g.at("max").get_to(r.gaps.max);
    g.at("witness").at("replicate").get_to(r.gaps.witness_replicate);
    g.at("witness").at("x").get_to(r.gaps.witness_x);
    g.at("witness").at("y").get_to(r.gaps.witness_y);
    const auto& tv = j.at("tv_bound");
    tv.at("value").get_to(r.tv.value);
    tv.at("per_coordinate_affinity").get_to(r.tv.per_coordinate_affinity);
    tv.at("coordinate_count").get_to(r.tv.coordinate_count);
    tv.at("method").get_to(r.tv.method);
    const auto& c = j.at("certificate");
    c.at("delta").get_to(r.certificate.delta);
    c.at("p_close_hat").get_to(r.certificate.p_close_hat);
    c.at("p_close_slack").get_to(r.certificate.p_close_slack);
    c.at("tv_bound").get_to(r.certificate.tv_bound);
    c.at("bound").get_to(r.certificate.bound);
    c.at("confidence").get_to(r.certificate.confidence);
    c.at("samples").get_to(r.certificate.samples);
    c.at("fluctuation_scale").get_to(r.fluctuation_scale);
    for (const auto& s : c.at("sweep")) {
      r.sweep.push_back({s.at("multiplier").get<double>(), s.at("delta").get<double>(),
                         s.at("p_close_hat").get<double>(), s.at("bound").get<double>(),
                         s.at("concentration").get<double>()});
    }
    const auto& conc = j.at("concentration");
    conc.at("delta").get_to(r.concentration.delta);
    conc.at("value").get_to(r.concentration.value);
    conc.at("bound_plus_slack").get_to(r.concentration.bound_plus_slack);
    conc.at("within_bound").get_to(r.concentration.within_bound);
    const auto& v = j.at("violations");
    v.at("count").get_to(r.violations.count);
    v.at("checks").get_to(r.violations.checks);
    v.at("details").get_to(r.violations.details);
    const auto& meta = j.at("meta");
    meta.at("wall_clock_seconds").get_to(r.wall_clock_seconds);
    meta.at("version").get_to(r.version);
    meta.at("statistics").get_to(r.statistics);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed report: ") + e.what());
  }
  return r;
}

bool same_report(const ExperimentReport& a, const ExperimentReport& b, bool ignore_wall_clock) {
  const auto& ca = a.certificate;
  const auto& cb = b.certificate;
  return same_config(a.config, b.config) && a.fluctuation_scale == b.fluctuation_scale && a.gaps == b.gaps &&
         a.tv == b.tv && ca.delta == cb.delta && ca.p_close_hat == cb.p_close_hat &&
         ca.p_close_slack == cb.p_close_slack && ca.tv_bound == cb.tv_bound && ca.bound == cb.bound &&
         ca.confidence == cb.confidence && ca.samples == cb.samples && a.sweep == b.sweep &&
         a.concentration == b.concentration && a.violations == b.violations && a.statistics == b.statistics &&
         a.version == b.version && (ignore_wall_clock || a.wall_clock_seconds == b.wall_clock_seconds);
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open report '" + path.string() + "' for writing");
  out << to_json(report).dump(2) << '\n';
  if (!out) throw IoError("write to report '" + path.string() + "' failed");
}

ExperimentReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open report '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("report '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return report_from_json(j);
}

void dump_csv(const Experiment& exp, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.precision(17);
  out << "replicate,x,y,gap\n";
  for (std::size_t i = 0; i < exp.x.size(); ++i) {
    out << i << ',' << exp.x[i] << ',' << exp.y[i] << ',' << exp.x[i] - exp.y[i] << '\n';
  }
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace anticonc
