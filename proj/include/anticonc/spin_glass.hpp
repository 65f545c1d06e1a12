#pragma once

// Sherrington-Kirkpatrick model at zero external field, solved exactly by
// enumerating all 2^n spin configurations.
//
//   H(sigma) = n^{-1/2} sum_{i<j} g_ij sigma_i sigma_j
//   F(beta)  = log sum_sigma exp(beta H(sigma))

#include <cstddef>
#include <span>

#include <Eigen/Core>

#include "anticonc/rng.hpp"

namespace anticonc {

inline constexpr int kSkMaxSpins = 20;

/// Couplings g_ij, i < j, held in a symmetric matrix with zero diagonal.
class SKDisorder {
 public:
  /// `upper` lists g_ij row by row over i < j: g_01, g_02, ..., g_{n-2,n-1}.
  SKDisorder(int n, std::span<const double> upper);

  /// i.i.d. standard Gaussian couplings; entry k (row-major upper order) uses stream k.
  static SKDisorder gaussian(int n, const SeedStream& streams);

  int n() const noexcept { return n_; }
  std::size_t pair_count() const noexcept { return static_cast<std::size_t>(n_) * (n_ - 1) / 2; }
  double g(int i, int j) const { return couplings_(i, j); }
  const Eigen::MatrixXd& couplings() const noexcept { return couplings_; }
  Eigen::VectorXd upper() const;

  /// Every coupling multiplied by `factor`.
  SKDisorder scaled(double factor) const;

 private:
  SKDisorder() = default;
  int n_ = 0;
  Eigen::MatrixXd couplings_;
};

struct SKResult {
  double beta = 0.0;
  double free_energy = 0.0;
  double gibbs_energy = 0.0;    // <H>_beta = F'(beta)
  double gibbs_variance = 0.0;  // Var_beta(H) = F''(beta)
  double ground_state = 0.0;    // max_sigma H
  double min_energy = 0.0;      // min_sigma H
};

/// H(sigma) for sigma in {-1, +1}^n. Wrong length raises ShapeError.
double hamiltonian(const SKDisorder& dis, std::span<const int> sigma);

/// Exact free energy, Gibbs mean/variance of H and ground state from a single
/// Gray-code sweep with O(n) updates per configuration. 2 <= n <= 20.
SKResult free_energy(const SKDisorder& dis, double beta);

struct ScaledDisorder {
  SKDisorder disorder;
  double factor = 1.0;  // 1 / (1 - alpha/n)
  double eps = 0.0;     // factor - 1
  double per_coordinate_affinity = 1.0;
  double coordinate_count = 0.0;
  double tv_bound = 0.0;
};

/// g -> g / (1 - alpha/n). The per-coordinate affinity is the Gaussian
/// scaled affinity at eps = 1/(1 - alpha/n) - 1.
ScaledDisorder scale_disorder(const SKDisorder& dis, double alpha);

struct JensenCheck {
  double lhs = 0.0;  // F~(beta) - F(beta)
  double rhs = 0.0;  // beta alpha <H>_beta / (n (1 - alpha/n))
  bool holds = true;
  SKResult base;
  SKResult scaled;
};

JensenCheck jensen_gap_check(const SKDisorder& dis, double alpha, double beta);

struct DerivativeCheck {
  double fd_derivative = 0.0;         // central difference, step 1e-4
  double gibbs_energy = 0.0;
  bool agree = true;                  // within 1e-5 relative (floor 1)
  double fd_second_derivative = 0.0;  // central second difference, step 1e-2
};

DerivativeCheck derivative_check(const SKDisorder& dis, double beta);

}  // namespace anticonc
