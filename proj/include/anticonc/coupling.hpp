#pragma once

// Anti-concentration certificates from couplings.
//
// If X and Y live on one probability space then for every interval [a, b]
//
//   P(a <= X <= b) <= (1 + P(|X - Y| <= b - a) + d_TV(L_X, L_Y)) / 2.
//
// The TV term is always bounded analytically through Hellinger affinities
// (d_TV <= sqrt(1 - rho^2), rho multiplicative over products); only the
// P(|X - Y| <= delta) term is estimated, with a Hoeffding correction.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "anticonc/rng.hpp"

namespace anticonc {

struct CouplingCertificate {
  double delta = 0.0;
  double p_close_hat = 0.0;
  double p_close_slack = 0.0;
  double tv_bound = 0.0;
  double bound = 1.0;
  double confidence = 0.95;
  std::size_t samples = 0;
};

enum class PerturbationKind { Scale, Mixing, PhiNonlinear, EdgeGraded };

/// Per-coordinate perturbation strengths with their affinity lower bounds.
struct PerturbationPlan {
  PerturbationKind kind = PerturbationKind::Scale;
  std::vector<double> eps_values;
  std::vector<double> affinity_lower_bounds;

  /// Throws DomainError if the type invariants fail.
  void validate() const;
};

/// min(1, (1 + p_close + tv) / 2); both arguments in [0, 1].
double anti_concentration_bound(double p_close, double tv);

/// sqrt(1 - rho^2); rho in [0, 1].
double tv_upper_from_affinity(double rho);

/// Product of per-coordinate affinities (1 for an empty list).
double product_affinity(std::span<const double> rhos);

/// sqrt(1 - prod rho_i^2), evaluated in log space.
double product_tv_bound(std::span<const double> rhos);
double product_tv_bound(const PerturbationPlan& plan);

/// sqrt(1 - rho^(2 count)) for `count` coordinates sharing one affinity.
double uniform_product_tv_bound(double rho, double count);

/// TV bound from an accumulated sum of log affinities.
double tv_from_log_affinity(double log_rho_sum);

/// (sqrt(1+eps) + sqrt(1-eps)) / 2: affinity of Bernoulli(1/2) and Bernoulli((1+eps)/2).
double bernoulli_affinity(double eps);

struct BernoulliPair {
  Eigen::Array<std::uint8_t, Eigen::Dynamic, 1> x;
  Eigen::Array<std::uint8_t, Eigen::Dynamic, 1> x_prime;
};

/// X i.i.d. Bernoulli(1/2); X'_i = X_i with probability 1 - eps, else 1, where
/// eps = alpha / sqrt(n). Coordinate i draws from stream i.
BernoulliPair bernoulli_mixing_coupling(std::size_t n, double alpha, const SeedStream& streams);

/// Exact d_TV(Bernoulli(1/2)^n, Bernoulli((1+eps)/2)^n), n <= 100000.
double bernoulli_exact_tv(std::size_t n, double eps);

/// sup over closed intervals of length l of the empirical measure.
/// `sorted` must be nondecreasing.
double empirical_concentration_function(std::span<const double> sorted, double l);

/// sqrt(ln(2 / (1 - confidence)) / (2 N)).
double hoeffding_slack(std::size_t samples, double confidence);

/// Assembles a certificate from indicators of {|X - Y| <= delta}.
CouplingCertificate certify(std::span<const std::uint8_t> close, double tv_bound, double confidence,
                            double delta = 0.0);

}  // namespace anticonc
