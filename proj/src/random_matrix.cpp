#include "anticonc/random_matrix.hpp"

#include "anticonc/coupling.hpp"

namespace anticonc {

double shift_tv_bound(const MatrixEnsembleSpec& spec, double alpha, const Density1D& law) {
  const double eps = alpha / std::sqrt(static_cast<double>(spec.n_inputs));
  if (eps == 0.0) return 0.0;
  return uniform_product_tv_bound(scaled_affinity(law, eps).rho, static_cast<double>(spec.n_inputs));
}

Eigen::VectorXd sample_inputs(const MatrixEnsembleSpec& spec, const Density1D& law, const SeedStream& streams) {
  return sample_iid(law, spec.n_inputs, streams);
}

CovarianceExperiment covariance_fluctuation_experiment(int p, std::size_t n, const Density1D& law, double alpha,
                                                       std::size_t seeds, std::uint64_t seed, double delta) {
  const MatrixEnsembleSpec spec = MatrixEnsembleSpec::covariance(p, n);
  if (seeds == 0) throw DomainError("covariance_fluctuation_experiment: no seeds");
  if (!(delta >= 0.0)) throw DomainError("covariance_fluctuation_experiment: delta must be >= 0");
  CovarianceExperiment out;
  out.delta = delta;
  out.tv_bound = shift_tv_bound(spec, alpha, law);
  out.predicted_gap = 2.0 * p * std::log1p(alpha / std::sqrt(static_cast<double>(spec.n_inputs)));
  for (std::size_t s = 0; s < seeds; ++s) {
    const Eigen::VectorXd x = sample_inputs(spec, law, SeedStream(seed, s));
    const ShiftCheck<double> c = scaling_shift_check(spec, x, alpha);
    if (!c.exact) throw ViolationError("covariance_fluctuation_experiment: scaling shift identity failed");
    out.log_det.push_back(c.L);
    out.gap.push_back(c.L - c.L_prime);
    out.close.push_back(std::abs(c.L - c.L_prime) <= delta ? 1 : 0);
  }
  return out;
}

}  // namespace anticonc
