#pragma once

// Matrices that are homogeneous functions of i.i.d. scalar inputs and the
// exact log-determinant shift under input scaling.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "anticonc/densities.hpp"
#include "anticonc/errors.hpp"

namespace anticonc {

enum class EnsembleKind { Wigner, SampleCovariance };

struct MatrixEnsembleSpec {
  EnsembleKind kind = EnsembleKind::Wigner;
  int N = 1;                     // matrix order (p for covariance)
  std::size_t n_inputs = 1;
  int r = 1;                     // homogeneity degree
  std::size_t sample_count = 0;  // covariance only

  static MatrixEnsembleSpec wigner(int N) {
    MatrixEnsembleSpec s{EnsembleKind::Wigner, N, static_cast<std::size_t>(N) * (N + 1) / 2, 1, 0};
    s.validate();
    return s;
  }
  /// p-dimensional data, n samples; p <= n - 1.
  static MatrixEnsembleSpec covariance(int p, std::size_t n) {
    MatrixEnsembleSpec s{EnsembleKind::SampleCovariance, p, n * static_cast<std::size_t>(p), 2, n};
    s.validate();
    return s;
  }

  void validate() const {
    if (N < 1 || N > 4096) throw SizeError("matrix order must lie in [1, 4096]");
    if (kind == EnsembleKind::Wigner) {
      if (r != 1 || n_inputs != static_cast<std::size_t>(N) * (N + 1) / 2) {
        throw ShapeError("wigner spec needs r = 1 and N(N+1)/2 inputs");
      }
    } else {
      if (r != 2 || n_inputs != sample_count * static_cast<std::size_t>(N)) {
        throw ShapeError("covariance spec needs r = 2 and n p inputs");
      }
      if (static_cast<std::size_t>(N) + 1 > sample_count) throw SizeError("covariance spec needs p <= n - 1");
    }
  }
};

/// Wigner: inputs fill the upper triangle with diagonal, row by row.
/// Covariance: inputs are n consecutive p-vectors Y_i and the result is
/// W = n^{-1} sum_i (Y_i - Ybar)(Y_i - Ybar)^T.
template <class Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> build(const MatrixEnsembleSpec& spec,
                                                                              const Eigen::MatrixBase<Derived>& inputs) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  spec.validate();
  if (static_cast<std::size_t>(inputs.size()) != spec.n_inputs) {
    throw ShapeError("build: expected " + std::to_string(spec.n_inputs) + " inputs, got " +
                     std::to_string(inputs.size()));
  }
  const Eigen::Index N = spec.N;
  if (spec.kind == EnsembleKind::Wigner) {
    Mat m(N, N);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < N; ++i) {
      for (Eigen::Index j = i; j < N; ++j, ++k) m(i, j) = m(j, i) = inputs(k);
    }
    return m;
  }
  const auto n = static_cast<Eigen::Index>(spec.sample_count);
  Mat Y(N, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index d = 0; d < N; ++d) Y(d, i) = inputs(i * N + d);
  Y.colwise() -= Y.rowwise().mean();
  Mat W = (Y * Y.transpose()) / static_cast<Scalar>(n);
  return Scalar(0.5) * (W + W.transpose());
}

template <class Scalar>
struct LogDetResult {
  Scalar log_abs_det = 0;
  int sign = 1;
  bool rank_deficient = false;
};

inline constexpr double kPivotThreshold = 1e-300;

/// Partial-pivot LU; log|det| accumulated from the pivots.
template <class Derived>
LogDetResult<typename Derived::Scalar> log_abs_det(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) {
    throw ShapeError("log_abs_det: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  LogDetResult<Scalar> out;
  if (m.rows() == 0) return out;
  const Eigen::PartialPivLU<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> lu(m.eval());
  const auto& U = lu.matrixLU();
  int sign = static_cast<int>(lu.permutationP().determinant());
  Scalar total = 0;
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    const Scalar pivot = U(i, i);
    if (!(std::abs(pivot) >= Scalar(kPivotThreshold))) {
      out.rank_deficient = true;
      out.sign = 0;
      out.log_abs_det = -std::numeric_limits<Scalar>::infinity();
      return out;
    }
    if (pivot < 0) sign = -sign;
    total += std::log(std::abs(pivot));
  }
  out.log_abs_det = total;
  out.sign = sign;
  return out;
}

template <class Scalar>
struct ShiftCheck {
  Scalar L = 0;
  Scalar L_prime = 0;
  Scalar shift = 0;  // r N log(1 + eps)
  Scalar eps = 0;    // alpha / sqrt(n_inputs)
  bool exact = true;
};

inline constexpr double kShiftTolerance = 1e-9;

/// L = log|det build(x)|, L' = log|det build(x / (1+eps))|, exact iff
/// |L - L' - shift| <= 1e-9 max(1, |L|).
template <class Derived>
ShiftCheck<typename Derived::Scalar> scaling_shift_check(const MatrixEnsembleSpec& spec,
                                                         const Eigen::MatrixBase<Derived>& inputs,
                                                         typename Derived::Scalar alpha) {
  using Scalar = typename Derived::Scalar;
  ShiftCheck<Scalar> out;
  out.eps = alpha / std::sqrt(static_cast<Scalar>(spec.n_inputs));
  if (!(out.eps >= 0 && out.eps < Scalar(0.5))) throw DomainError("scaling_shift_check: alpha n^{-1/2} outside [0, 1/2)");
  const auto base = log_abs_det(build(spec, inputs));
  if (base.rank_deficient) throw RankError("scaling_shift_check: matrix is singular");
  const auto scaled = log_abs_det(build(spec, inputs / (Scalar(1) + out.eps)));
  if (scaled.rank_deficient) throw RankError("scaling_shift_check: scaled matrix is singular");
  out.L = base.log_abs_det;
  out.L_prime = scaled.log_abs_det;
  out.shift = static_cast<Scalar>(spec.r) * static_cast<Scalar>(spec.N) * std::log1p(out.eps);
  out.exact = std::abs(out.L - out.L_prime - out.shift) <=
              Scalar(kShiftTolerance) * std::max(Scalar(1), std::abs(out.L));
  return out;
}

/// TV bound of the input scaling coupling over all n_inputs coordinates.
double shift_tv_bound(const MatrixEnsembleSpec& spec, double alpha, const Density1D& law);

/// Inputs of one replicate; coordinate k uses stream k.
Eigen::VectorXd sample_inputs(const MatrixEnsembleSpec& spec, const Density1D& law, const SeedStream& streams);

struct CovarianceExperiment {
  std::vector<double> log_det;        // L per seed
  std::vector<double> gap;            // L - L' per seed
  std::vector<std::uint8_t> close;    // gap <= delta
  double predicted_gap = 0.0;         // r p log(1 + alpha (np)^{-1/2})
  double tv_bound = 0.0;
  double delta = 0.0;
};

/// Replicates 0..seeds-1 of SeedStream(seed, replicate).
CovarianceExperiment covariance_fluctuation_experiment(int p, std::size_t n, const Density1D& law, double alpha,
                                                       std::size_t seeds, std::uint64_t seed, double delta);

}  // namespace anticonc
