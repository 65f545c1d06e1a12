#include "anticonc/euclidean.hpp"

#include <cmath>
#include <string>

#include "anticonc/coupling.hpp"

namespace anticonc {

std::string_view to_string(FunctionalKind kind) {
  switch (kind) {
    case FunctionalKind::TspExact:
      return "tsp-exact";
    case FunctionalKind::Tsp2Opt:
      return "tsp-2opt";
    case FunctionalKind::MatchingExact:
      return "matching-exact";
    case FunctionalKind::NnSum:
      return "nn-sum";
  }
  return "unknown";
}

FunctionalKind functional_from_string(std::string_view name) {
  if (name == "tsp-exact") return FunctionalKind::TspExact;
  if (name == "tsp-2opt") return FunctionalKind::Tsp2Opt;
  if (name == "matching-exact") return FunctionalKind::MatchingExact;
  if (name == "nn-sum") return FunctionalKind::NnSum;
  throw ConfigError("unknown functional '" + std::string(name) + "'");
}

namespace {

double scaling_eps(std::size_t n, double alpha) {
  const double eps = alpha / std::sqrt(static_cast<double>(n));
  if (!(eps >= 0.0 && eps < 0.5)) throw DomainError("scaling_coupling: alpha n^{-1/2} outside [0, 1/2)");
  return eps;
}

}  // namespace

ScalingCoupling scaling_coupling(const PointSet<double>& pts, double alpha, double r, FunctionalKind kind,
                                 double per_coordinate_affinity, const FunctionalOptions& opts) {
  const auto n = static_cast<std::size_t>(pts.cols());
  ScalingCoupling out;
  out.eps = scaling_eps(n, alpha);
  out.L = evaluate(kind, pts, opts).value;
  const double factor = std::pow(1.0 + out.eps, r);
  out.L_prime = out.L / factor;
  const PointSet<double> scaled = pts / (1.0 + out.eps);
  out.L_prime_reevaluated = evaluate(kind, scaled, opts).value;
  const double scale = std::max({std::abs(out.L_prime), std::abs(out.L_prime_reevaluated), 1e-300});
  if (std::abs(out.L_prime - out.L_prime_reevaluated) > kHomogeneityTolerance * scale) {
    throw InternalError("scaling_coupling: functional " + std::string(to_string(kind)) + " is not " +
                        std::to_string(r) + "-homogeneous on this instance");
  }
  out.per_coordinate_affinity = out.eps == 0.0 ? 1.0 : per_coordinate_affinity;
  out.coordinate_count = static_cast<double>(pts.size());
  out.tv_bound = uniform_product_tv_bound(out.per_coordinate_affinity, out.coordinate_count);
  return out;
}

ScalingCoupling scaling_coupling(const PointSet<double>& pts, double alpha, double r, FunctionalKind kind,
                                 const Density1D& law, const FunctionalOptions& opts) {
  const double eps = scaling_eps(static_cast<std::size_t>(pts.cols()), alpha);
  return scaling_coupling(pts, alpha, r, kind, scaled_affinity(law, eps).rho, opts);
}

double rhee_affinity(double vol, double theta) {
  if (!(vol > 0.0 && vol <= 1.0)) throw DomainError("rhee_affinity: Vol(D) must lie in (0, 1]");
  if (!(theta >= 0.0 && theta < 1.0)) throw DomainError("rhee_affinity: theta must lie in [0, 1)");
  const double outside = (1.0 - vol) * std::sqrt(1.0 - theta);
  const double inside = vol * std::sqrt(1.0 - theta + theta / vol);
  return std::min(1.0, outside + inside);
}

namespace {

bool in_D(const PointSet<double>& x, std::size_t m, double r2, double px, double py) {
  for (std::size_t j = 0; j < m; ++j) {
    const double dx = x(0, static_cast<Eigen::Index>(j)) - px;
    const double dy = x(1, static_cast<Eigen::Index>(j)) - py;
    if (dx * dx + dy * dy <= r2) return true;
  }
  return false;
}

}  // namespace

RheeSample rhee_coupling_sample(std::size_t n, double alpha, double beta, const SeedStream& streams) {
  if (n < 8) throw SizeError("rhee_coupling_sample needs n >= 8");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("rhee_coupling_sample: alpha must lie in (0, 1)");
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double theta = beta / sqrt_n;
  if (!(theta >= 0.0 && theta < 1.0)) throw DomainError("rhee_coupling_sample: beta n^{-1/2} outside [0, 1)");

  RheeSample s;
  RheeCoupling& c = s.coupling;
  c.m = n / 2;
  c.ball_radius = alpha / sqrt_n;  // alpha n^{-1/d}, d = 2
  c.theta = theta;
  c.coordinate_count = n - c.m;
  const auto cols = static_cast<Eigen::Index>(n);
  s.x.resize(2, cols);
  for (Eigen::Index i = 0; i < cols; ++i) {
    CounterRng rng = streams.stream(static_cast<std::uint64_t>(i));
    s.x(0, i) = rng.uniform();
    s.x(1, i) = rng.uniform();
  }

  const double r2 = c.ball_radius * c.ball_radius;
  CounterRng probes = streams.stream(2 * n);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < kRheeVolumeProbes; ++k) {
    const double px = probes.uniform();
    const double py = probes.uniform();
    hits += in_D(s.x, c.m, r2, px, py);
  }
  const double probes_n = static_cast<double>(kRheeVolumeProbes);
  c.vol_D_estimate = std::max(static_cast<double>(hits), 1.0) / probes_n;
  c.vol_D_stderr = std::sqrt(c.vol_D_estimate * (1.0 - c.vol_D_estimate) / probes_n);

  s.x_prime = s.x;
  s.y = PointSet<double>::Constant(2, cols, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = c.m; i < n; ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    CounterRng rng = streams.stream(n + i);
    const bool resample = rng.uniform() < theta;
    std::size_t attempts = 0;
    for (;;) {
      const double px = rng.uniform();
      const double py = rng.uniform();
      if (in_D(s.x, c.m, r2, px, py)) {
        s.y(0, col) = px;
        s.y(1, col) = py;
        break;
      }
      if (++attempts >= kRheeRejectionBudget) {
        throw NumericError("rhee_coupling_sample: degenerate D, rejection sampling exhausted its budget",
                           c.vol_D_estimate, c.vol_D_stderr);
      }
    }
    if (resample) {
      s.x_prime.col(col) = s.y.col(col);
      c.resample_indices.push_back(static_cast<int>(i));
    }
  }

  c.exact_affinity_per_coordinate = rhee_affinity(c.vol_D_estimate, theta);
  const double vol_lo = std::max(c.vol_D_estimate - 3.0 * c.vol_D_stderr, 1.0 / probes_n);
  c.conservative_affinity = rhee_affinity(vol_lo, theta);
  c.tv_bound = uniform_product_tv_bound(c.conservative_affinity, static_cast<double>(c.coordinate_count));
  return s;
}

double rhee_gap_statistics(const RheeSample& sample, FunctionalKind kind, const FunctionalOptions& opts) {
  return evaluate(kind, sample.x, opts).value - evaluate(kind, sample.x_prime, opts).value;
}

double rhee_surgery_bound(const RheeSample& sample, double max_edge) {
  double total = 0.0;
  for (int i : sample.coupling.resample_indices) {
    total += (sample.x.col(i) - sample.y.col(i)).norm() + max_edge;
  }
  return 2.0 * total;
}

}  // namespace anticonc
