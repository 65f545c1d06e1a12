#include "anticonc/densities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "anticonc/errors.hpp"
#include "anticonc/quadrature.hpp"

namespace anticonc {

namespace {

constexpr double kFullLineEdge = 40.0;
constexpr double kHalfLineEdge = 80.0;

void require_eps(double eps) {
  if (!(eps > -0.5 && eps < 0.5)) {
    std::ostringstream os;
    os << "scaling perturbation eps = " << eps << " outside (-1/2, 1/2)";
    throw DomainError(os.str());
  }
}

}  // namespace

std::vector<double> support_panels(bool half_line, std::span<const double> extra) {
  std::vector<double> pts = half_line
                                ? std::vector<double>{0.0, 0.125, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 40.0, kHalfLineEdge}
                                : std::vector<double>{-kFullLineEdge, -16.0, -8.0, -4.0, -2.0, -1.0, -0.5, 0.0,
                                                      0.5,            1.0,   2.0,  4.0,  8.0,  16.0, kFullLineEdge};
  const double lo = pts.front();
  const double hi = pts.back();
  for (double x : extra) {
    if (x > lo && x < hi) pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double Density1D::pdf(double x) const { return in_support(x) ? std::exp(-V(x)) : 0.0; }

Density1D standard_density(std::string_view name) {
  Density1D d;
  d.name = std::string(name);
  if (name == kStdGaussian) {
    const double log_norm = 0.5 * std::log(2.0 * std::numbers::pi);
    d.support = Support::FullLine;
    d.V = [log_norm](double x) { return 0.5 * x * x + log_norm; };
    d.dV = [](double x) { return x; };
    d.d2V = [](double) { return 1.0; };
    d.sampler = [](CounterRng& rng) { return rng.normal(); };
  } else if (name == kExponential) {
    d.support = Support::HalfLine;
    d.V = [](double x) { return x; };
    d.dV = [](double) { return 1.0; };
    d.d2V = [](double) { return 0.0; };
    d.sampler = [](CounterRng& rng) { return rng.exponential(); };
  } else if (name == kHalfGaussian) {
    const double log_norm = 0.5 * std::log(std::numbers::pi / 2.0);
    d.support = Support::HalfLine;
    d.V = [log_norm](double x) { return 0.5 * x * x + log_norm; };
    d.dV = [](double x) { return x; };
    d.d2V = [](double) { return 1.0; };
    d.sampler = [](CounterRng& rng) { return std::abs(rng.normal()); };
  } else {
    throw ConfigError("unknown density '" + std::string(name) + "' (expected std-gaussian, exponential-rate-1 or half-gaussian)");
  }
  return d;
}

Density1D scaled_density(const Density1D& f, double eps) {
  const double s = 1.0 + eps;
  if (!(s > 0.0)) throw DomainError("scaled_density requires 1 + eps > 0");
  Density1D g;
  g.name = f.name + "/(1+eps)";
  g.support = f.support;
  const double log_s = std::log(s);
  g.V = [V = f.V, s, log_s](double x) { return V(s * x) - log_s; };
  g.dV = [dV = f.dV, s](double x) { return s * dV(s * x); };
  g.d2V = [d2V = f.d2V, s](double x) { return s * s * d2V(s * x); };
  g.sampler = [sampler = f.sampler, s](CounterRng& rng) { return sampler(rng) / s; };
  return g;
}

double normalization(const Density1D& f) {
  const auto panels = support_panels(f.half_line());
  return integrate_panels([&](double x) { return std::exp(-f.V(x)); }, panels).value;
}

AffinityResult hellinger_affinity(const Density1D& f, const Density1D& g) {
  if (f.support != g.support) {
    throw DomainError("hellinger_affinity: densities '" + f.name + "' and '" + g.name +
                      "' have different support types");
  }
  const auto panels = support_panels(f.half_line());
  auto integrand = [&](double x) {
    const double d = std::exp(-0.5 * f.V(x)) - std::exp(-0.5 * g.V(x));
    return 0.5 * d * d;
  };
  const QuadratureResult q = integrate_panels(integrand, panels);
  const double rho = std::clamp(1.0 - q.value, 0.0, 1.0);
  if (!(q.error <= kAffinityTolerance) || !std::isfinite(q.value)) {
    throw NumericError("hellinger_affinity: quadrature did not converge below 1e-8", rho, q.error);
  }
  return {rho, q.error, AffinityMethod::AdaptiveQuadrature};
}

AffinityResult scaled_affinity(const Density1D& f, double eps) {
  require_eps(eps);
  if (eps == 0.0) return {1.0, 0.0, AffinityMethod::ClosedForm};
  return hellinger_affinity(f, scaled_density(f, eps));
}

std::optional<double> scaled_affinity_closed_form(std::string_view name, double eps) {
  require_eps(eps);
  const double s = 1.0 + eps;
  if (name == kExponential) return 2.0 * std::sqrt(s) / (1.0 + s);
  if (name == kStdGaussian || name == kHalfGaussian) return std::sqrt(2.0 * s / (1.0 + s * s));
  return std::nullopt;
}

double empirical_affinity_constant(const Density1D& f, std::span<const double> eps_grid) {
  double c = 0.0;
  for (double eps : eps_grid) {
    if (eps == 0.0) continue;
    c = std::max(c, (1.0 - scaled_affinity(f, eps).rho) / (eps * eps));
  }
  return c;
}

Eigen::VectorXd sample_iid(const Density1D& f, std::size_t n, const SeedStream& streams) {
  if (n == 0) throw DomainError("sample_iid requires n >= 1");
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    CounterRng rng = streams.stream(i);
    out[static_cast<Eigen::Index>(i)] = f.sample(rng);
  }
  return out;
}

}  // namespace anticonc
