#pragma once

// Random assignment problem and the phi-perturbation coupling
//
//   a'_ij solves  a'_ij + (alpha/n) phi(a'_ij) = a_ij,
//   phi(x) = sqrt(n) x for x <= 1/n,  x + n^{-1/2} - n^{-1} otherwise.

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "anticonc/densities.hpp"
#include "anticonc/rng.hpp"

namespace anticonc {

inline constexpr int kAssignmentMaxN = 2000;

struct AssignmentResult {
  std::vector<int> permutation;  // row i -> column permutation[i]
  double cost = 0.0;
};

/// Throws unless the matrix is square, nonempty, finite and nonnegative.
void validate_cost_matrix(const Eigen::MatrixXd& cm);

/// O(n^3) Hungarian method with row and column potentials.
AssignmentResult hungarian(const Eigen::MatrixXd& cm);

double phi(double x, double n);
double phi_prime(double x, double n);

/// Unique y >= 0 with y + (alpha/n) phi(y) = a, in closed form.
double invert_perturbation(double a, double alpha, double n);

/// Entrywise invert_perturbation.
Eigen::MatrixXd perturb_costs(const Eigen::MatrixXd& cm, double alpha);

/// rho(L_X, L_Y) for X ~ f and Y the perturbed cost. Half-line f,
/// alpha/n in [0, 1/2).
AffinityResult perturbation_affinity(const Density1D& f, double alpha, double n);

struct GapCertificate {
  double C = 0.0;
  double C_prime = 0.0;
  std::size_t A_size = 0;
  double lower_bound = 0.0;  // alpha |A| / (n^{3/2} + alpha n)
  bool holds = true;
  bool entrywise_holds = true;  // rows in A: a'_ij >= 1/(n + alpha sqrt n), a - a' >= alpha/(n^{3/2}+alpha n)
  AssignmentResult base;
  AssignmentResult perturbed;
};

GapCertificate gap_certificate(const Eigen::MatrixXd& cm, double alpha);

/// P(min_j a_ij >= 1/n) = (int_{1/n}^inf e^{-V})^n.
double row_min_probability(const Density1D& f, std::size_t n);

/// n x n i.i.d. costs; entry (i, j) uses stream i n + j.
Eigen::MatrixXd sample_costs(std::size_t n, const Density1D& f, const SeedStream& streams);

}  // namespace anticonc
