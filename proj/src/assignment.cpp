#include "anticonc/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "anticonc/errors.hpp"
#include "anticonc/quadrature.hpp"

namespace anticonc {

void validate_cost_matrix(const Eigen::MatrixXd& cm) {
  if (cm.rows() == 0 || cm.rows() != cm.cols()) {
    throw ShapeError("cost matrix must be square and nonempty (got " + std::to_string(cm.rows()) + "x" +
                     std::to_string(cm.cols()) + ")");
  }
  if (cm.rows() > kAssignmentMaxN) throw SizeError("cost matrix larger than 2000");
  if (!cm.allFinite() || (cm.array() < 0.0).any()) throw DomainError("cost entries must be finite and >= 0");
}

AssignmentResult hungarian(const Eigen::MatrixXd& cm) {
  validate_cost_matrix(cm);
  const int n = static_cast<int>(cm.rows());
  constexpr double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials; column 0 is a virtual start.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cm(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  AssignmentResult out;
  out.permutation.assign(n, -1);
  for (int j = 1; j <= n; ++j) out.permutation[p[j] - 1] = j - 1;
  for (int i = 0; i < n; ++i) out.cost += cm(i, out.permutation[i]);
  return out;
}

double phi(double x, double n) {
  if (!(x >= 0.0)) throw DomainError("phi: x must be >= 0");
  if (!(n >= 1.0)) throw DomainError("phi: n must be >= 1");
  const double root = std::sqrt(n);
  return x <= 1.0 / n ? root * x : x + 1.0 / root - 1.0 / n;
}

double phi_prime(double x, double n) {
  if (!(x >= 0.0)) throw DomainError("phi_prime: x must be >= 0");
  return x < 1.0 / n ? std::sqrt(n) : 1.0;
}

double invert_perturbation(double a, double alpha, double n) {
  if (!(a >= 0.0)) throw DomainError("invert_perturbation: a must be >= 0");
  if (!(alpha >= 0.0)) throw DomainError("invert_perturbation: alpha must be >= 0");
  const double root = std::sqrt(n);
  const double a_star = (1.0 + alpha / root) / n;
  if (a <= a_star) return a / (1.0 + alpha / root);
  return (a - alpha / n * (1.0 / root - 1.0 / n)) / (1.0 + alpha / n);
}

Eigen::MatrixXd perturb_costs(const Eigen::MatrixXd& cm, double alpha) {
  const double n = static_cast<double>(cm.rows());
  return cm.unaryExpr([&](double a) { return invert_perturbation(a, alpha, n); });
}

AffinityResult perturbation_affinity(const Density1D& f, double alpha, double n) {
  if (!f.half_line()) throw DomainError("perturbation_affinity: needs a half-line density");
  if (!(n >= 1.0)) throw DomainError("perturbation_affinity: n must be >= 1");
  const double eps = alpha / n;
  if (!(eps >= 0.0 && eps < 0.5)) throw DomainError("perturbation_affinity: alpha/n outside [0, 1/2)");
  if (eps == 0.0) return {1.0, 0.0, AffinityMethod::ClosedForm};
  const double breakpoint = 1.0 / n;
  const double extra[] = {breakpoint};
  const std::vector<double> panels = support_panels(true, extra);
  auto integrand = [&](double x) {
    const double g = std::sqrt(1.0 + eps * phi_prime(x, n)) * std::exp(-0.5 * f.V(x + eps * phi(x, n)));
    const double d = g - std::exp(-0.5 * f.V(x));
    return 0.5 * d * d;
  };
  const QuadratureResult q = integrate_panels(integrand, panels);
  const double rho = std::clamp(1.0 - q.value, 0.0, 1.0);
  if (!(q.error <= kAffinityTolerance) || !std::isfinite(q.value)) {
    throw NumericError("perturbation_affinity: quadrature did not converge below 1e-8", rho, q.error);
  }
  return {rho, q.error, AffinityMethod::AdaptiveQuadrature};
}

GapCertificate gap_certificate(const Eigen::MatrixXd& cm, double alpha) {
  validate_cost_matrix(cm);
  if (!(alpha >= 0.0)) throw DomainError("gap_certificate: alpha must be >= 0");
  const double n = static_cast<double>(cm.rows());
  const Eigen::MatrixXd perturbed = perturb_costs(cm, alpha);
  GapCertificate out;
  out.base = hungarian(cm);
  out.perturbed = hungarian(perturbed);
  out.C = out.base.cost;
  out.C_prime = out.perturbed.cost;
  const double entry_gap = alpha / (std::pow(n, 1.5) + alpha * n);
  const double entry_floor = 1.0 / (n + alpha * std::sqrt(n));
  const Eigen::VectorXd row_min = cm.rowwise().minCoeff();
  for (Eigen::Index i = 0; i < cm.rows(); ++i) {
    if (!(row_min[i] >= 1.0 / n)) continue;
    ++out.A_size;
    for (Eigen::Index j = 0; j < cm.cols(); ++j) {
      const double tol = 1e-12 * std::max(1.0, cm(i, j));
      if (perturbed(i, j) < entry_floor - tol || cm(i, j) - perturbed(i, j) < entry_gap - tol) {
        out.entrywise_holds = false;
      }
    }
  }
  out.lower_bound = static_cast<double>(out.A_size) * entry_gap;
  out.holds = out.C - out.C_prime >= out.lower_bound - 1e-10;
  return out;
}

double row_min_probability(const Density1D& f, std::size_t n) {
  if (!f.half_line()) throw DomainError("row_min_probability: needs a half-line density");
  if (n == 0) throw DomainError("row_min_probability: n must be >= 1");
  const double lo = 1.0 / static_cast<double>(n);
  const double extra[] = {lo};
  std::vector<double> panels = support_panels(true, extra);
  panels.erase(panels.begin(), std::find(panels.begin(), panels.end(), lo));
  const QuadratureResult q = integrate_panels([&](double x) { return std::exp(-f.V(x)); }, panels);
  if (!(q.error <= kAffinityTolerance)) {
    throw NumericError("row_min_probability: quadrature did not converge", q.value, q.error);
  }
  return std::pow(std::clamp(q.value, 0.0, 1.0), static_cast<double>(n));
}

Eigen::MatrixXd sample_costs(std::size_t n, const Density1D& f, const SeedStream& streams) {
  if (n == 0 || n > kAssignmentMaxN) throw SizeError("sample_costs: n must lie in [1, 2000]");
  if (!f.half_line()) throw DomainError("sample_costs: costs need a half-line density");
  const auto len = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd cm(len, len);
  for (Eigen::Index i = 0; i < len; ++i) {
    for (Eigen::Index j = 0; j < len; ++j) {
      CounterRng rng = streams.stream(static_cast<std::uint64_t>(i * len + j));
      cm(i, j) = f.sample(rng);
    }
  }
  return cm;
}

}  // namespace anticonc
