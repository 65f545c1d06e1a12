#include "anticonc/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "anticonc/errors.hpp"

namespace anticonc {

namespace {

void require_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    std::ostringstream os;
    os << what << " = " << v << " outside [0, 1]";
    throw DomainError(os.str());
  }
}

// Neumaier compensated summation.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

void PerturbationPlan::validate() const {
  if (eps_values.size() != affinity_lower_bounds.size()) {
    throw DomainError("perturbation plan: eps and affinity vectors differ in length");
  }
  for (double r : affinity_lower_bounds) require_unit(r, "affinity lower bound");
  if (kind == PerturbationKind::Scale) {
    for (double e : eps_values) {
      if (!(e > -0.5 && e < 0.5)) throw DomainError("perturbation plan: scale eps outside (-1/2, 1/2)");
    }
  }
}

double anti_concentration_bound(double p_close, double tv) {
  require_unit(p_close, "p_close");
  require_unit(tv, "tv");
  return std::min(1.0, 0.5 * (1.0 + p_close + tv));
}

double tv_upper_from_affinity(double rho) {
  require_unit(rho, "rho");
  return std::sqrt(std::max(0.0, (1.0 - rho) * (1.0 + rho)));
}

double product_affinity(std::span<const double> rhos) {
  double p = 1.0;
  for (double r : rhos) {
    require_unit(r, "rho");
    p *= r;
  }
  return p;
}

double tv_from_log_affinity(double log_rho_sum) {
  if (log_rho_sum > 0.0) throw DomainError("log affinity sum must be <= 0");
  // 1 - rho^2 = -expm1(2 log rho)
  return std::sqrt(std::clamp(-std::expm1(2.0 * log_rho_sum), 0.0, 1.0));
}

double product_tv_bound(std::span<const double> rhos) {
  CompensatedSum log_sum;
  for (double r : rhos) {
    require_unit(r, "rho");
    if (r == 0.0) return 1.0;
    log_sum.add(std::log(r));
  }
  return tv_from_log_affinity(std::min(0.0, log_sum.value()));
}

double product_tv_bound(const PerturbationPlan& plan) {
  plan.validate();
  return product_tv_bound(plan.affinity_lower_bounds);
}

double uniform_product_tv_bound(double rho, double count) {
  require_unit(rho, "rho");
  if (count < 0.0) throw DomainError("coordinate count must be nonnegative");
  if (count == 0.0 || rho == 1.0) return 0.0;
  if (rho == 0.0) return 1.0;
  return tv_from_log_affinity(count * std::log(rho));
}

double bernoulli_affinity(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("bernoulli_affinity: eps outside [0, 1]");
  return 0.5 * (std::sqrt(1.0 + eps) + std::sqrt(1.0 - eps));
}

BernoulliPair bernoulli_mixing_coupling(std::size_t n, double alpha, const SeedStream& streams) {
  if (n == 0) throw DomainError("bernoulli_mixing_coupling requires n >= 1");
  const double eps = alpha / std::sqrt(static_cast<double>(n));
  if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("bernoulli_mixing_coupling: eps = alpha/sqrt(n) outside [0, 1)");
  BernoulliPair out;
  const auto len = static_cast<Eigen::Index>(n);
  out.x.resize(len);
  out.x_prime.resize(len);
  for (Eigen::Index i = 0; i < len; ++i) {
    CounterRng rng = streams.stream(static_cast<std::uint64_t>(i));
    const std::uint8_t xi = rng.bernoulli(0.5) ? 1 : 0;
    const bool replace = rng.uniform() < eps;
    out.x[i] = xi;
    out.x_prime[i] = replace ? 1 : xi;
  }
  return out;
}

double bernoulli_exact_tv(std::size_t n, double eps) {
  if (n == 0 || n > 100000) throw DomainError("bernoulli_exact_tv: n must lie in [1, 100000]");
  if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("bernoulli_exact_tv: eps outside [0, 1)");
  if (eps == 0.0) return 0.0;
  const double nn = static_cast<double>(n);
  const double log_half = -nn * std::log(2.0);
  const double log_p = std::log1p(eps) - std::log(2.0);
  const double log_q = std::log1p(-eps) - std::log(2.0);
  const double lgn = std::lgamma(nn + 1.0);
  CompensatedSum total;
  for (std::size_t k = 0; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double log_binom = lgn - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0);
    const double a = std::exp(log_binom + log_half);
    const double b = std::exp(log_binom + kk * log_p + (nn - kk) * log_q);
    total.add(std::abs(a - b));
  }
  return std::clamp(0.5 * total.value(), 0.0, 1.0);
}

double empirical_concentration_function(std::span<const double> sorted, double l) {
  if (sorted.empty()) throw DomainError("empirical_concentration_function: no samples");
  if (!(l >= 0.0)) throw DomainError("empirical_concentration_function: l must be >= 0");
  if (!std::is_sorted(sorted.begin(), sorted.end())) {
    throw DomainError("empirical_concentration_function: samples not sorted");
  }
  std::size_t best = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (j < i) j = i;
    const double right = sorted[i] + l;
    while (j < sorted.size() && sorted[j] <= right) ++j;
    best = std::max(best, j - i);
  }
  return static_cast<double>(best) / static_cast<double>(sorted.size());
}

double hoeffding_slack(std::size_t samples, double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must lie in (0, 1)");
  if (samples == 0) throw DomainError("hoeffding_slack: no samples");
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) / (2.0 * static_cast<double>(samples)));
}

CouplingCertificate certify(std::span<const std::uint8_t> close, double tv_bound, double confidence, double delta) {
  if (close.empty()) throw DomainError("certify: empty indicator vector");
  require_unit(tv_bound, "tv_bound");
  CouplingCertificate c;
  c.samples = close.size();
  c.delta = delta;
  c.confidence = confidence;
  c.p_close_slack = hoeffding_slack(close.size(), confidence);
  std::size_t hits = 0;
  for (std::uint8_t b : close) hits += b != 0;
  c.p_close_hat = static_cast<double>(hits) / static_cast<double>(close.size());
  c.tv_bound = tv_bound;
  c.bound = anti_concentration_bound(std::min(1.0, c.p_close_hat + c.p_close_slack), tv_bound);
  return c;
}

}  // namespace anticonc
