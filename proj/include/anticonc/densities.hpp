#pragma once

// One-dimensional densities e^{-V} on the line or half-line, their samplers,
// and Hellinger affinities between a density and its perturbations.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "anticonc/rng.hpp"

namespace anticonc {

enum class Support { FullLine, HalfLine };

/// A smooth density e^{-V}. Half-line densities live on [0, inf) and must
/// have finite V(0+).
struct Density1D {
  std::string name;
  Support support = Support::FullLine;
  std::function<double(double)> V;
  std::function<double(double)> dV;
  std::function<double(double)> d2V;
  std::function<double(CounterRng&)> sampler;

  bool half_line() const noexcept { return support == Support::HalfLine; }
  bool in_support(double x) const noexcept { return !half_line() || x >= 0.0; }
  double pdf(double x) const;
  double sample(CounterRng& rng) const { return sampler(rng); }
};

/// Identifiers accepted by standard_density().
inline constexpr std::string_view kStdGaussian = "std-gaussian";
inline constexpr std::string_view kExponential = "exponential-rate-1";
inline constexpr std::string_view kHalfGaussian = "half-gaussian";

/// std-gaussian, exponential-rate-1 or half-gaussian. Unknown names throw ConfigError.
Density1D standard_density(std::string_view name);

/// Law of X / (1 + eps) when X has density f: (1+eps) e^{-V((1+eps) x)}.
Density1D scaled_density(const Density1D& f, double eps);

/// Quadrature tolerance below which affinities are accepted.
inline constexpr double kAffinityTolerance = 1e-8;

enum class AffinityMethod { ClosedForm, AdaptiveQuadrature };

struct AffinityResult {
  double rho = 1.0;
  double quadrature_error_estimate = 0.0;
  AffinityMethod method = AffinityMethod::ClosedForm;
};

/// Integral of e^{-V} over the support; should be 1.
double normalization(const Density1D& f);

/// rho(f, g) = int sqrt(f g). Computed as 1 - (1/2) int (sqrt f - sqrt g)^2 so
/// the deficit 1 - rho keeps full relative precision when rho is near 1.
/// Both densities must share a support type (DomainError otherwise); an error
/// estimate above kAffinityTolerance raises NumericError.
AffinityResult hellinger_affinity(const Density1D& f, const Density1D& g);

/// rho(L_X, L_{X/(1+eps)}) by quadrature; eps must lie in (-1/2, 1/2).
AffinityResult scaled_affinity(const Density1D& f, double eps);

/// Closed form of scaled_affinity for the standard densities, if known.
std::optional<double> scaled_affinity_closed_form(std::string_view name, double eps);

/// Empirical constant C(f) = max over the grid of (1 - rho(eps)) / eps^2.
double empirical_affinity_constant(const Density1D& f, std::span<const double> eps_grid);

/// n independent draws; draw i comes from stream coordinate i.
Eigen::VectorXd sample_iid(const Density1D& f, std::size_t n, const SeedStream& streams);

}  // namespace anticonc
