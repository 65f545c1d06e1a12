#pragma once

// Homogeneous Euclidean functionals of point sets (closed TSP tour, minimal
// perfect matching, nearest-neighbour sum) and the two couplings used to
// certify their fluctuations: global scaling X -> X/(1+eps), and Rhee's
// partial resampling of uniform points near a random half of the sample.
//
// Point sets are dim x n matrices, one point per column.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "anticonc/densities.hpp"
#include "anticonc/errors.hpp"
#include "anticonc/rng.hpp"

namespace anticonc {

template <typename Scalar>
using PointSet = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

enum class FunctionalKind { TspExact, Tsp2Opt, MatchingExact, NnSum };

std::string_view to_string(FunctionalKind kind);
FunctionalKind functional_from_string(std::string_view name);

inline constexpr int kTspExactMax = 15;
inline constexpr int kMatchingExactMax = 16;

template <typename Scalar>
struct FunctionalValue {
  FunctionalKind kind = FunctionalKind::NnSum;
  Scalar value = 0;
  std::vector<int> tour;                    // closed tour, tour[0] = start
  std::vector<std::pair<int, int>> pairs;   // matching witness
};

template <typename Derived>
PointSet<typename Derived::Scalar> distance_matrix(const Eigen::MatrixBase<Derived>& pts) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = pts.cols();
  PointSet<Scalar> d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      d(i, j) = d(j, i) = (pts.col(i) - pts.col(j)).norm();
    }
  }
  return d;
}

template <typename Derived>
typename Derived::Scalar tour_length(const Eigen::MatrixBase<Derived>& pts, const std::vector<int>& tour) {
  using Scalar = typename Derived::Scalar;
  Scalar len = 0;
  for (std::size_t k = 0; k < tour.size(); ++k) {
    len += (pts.col(tour[k]) - pts.col(tour[(k + 1) % tour.size()])).norm();
  }
  return len;
}

template <typename Derived>
typename Derived::Scalar matching_length(const Eigen::MatrixBase<Derived>& pts,
                                         const std::vector<std::pair<int, int>>& pairs) {
  typename Derived::Scalar len = 0;
  for (auto [i, j] : pairs) len += (pts.col(i) - pts.col(j)).norm();
  return len;
}

/// Optimal closed tour by Held-Karp dynamic programming; 3 <= n <= 15.
template <typename Derived>
FunctionalValue<typename Derived::Scalar> tsp_exact(const Eigen::MatrixBase<Derived>& pts) {
  using Scalar = typename Derived::Scalar;
  const int n = static_cast<int>(pts.cols());
  if (n < 3 || n > kTspExactMax) {
    throw SizeError("tsp_exact handles 3 <= n <= 15 points (got " + std::to_string(n) + "); use tsp_2opt");
  }
  const auto d = distance_matrix(pts);
  // Vertex 0 is the fixed start; subsets range over vertices 1..n-1.
  const int m = n - 1;
  const std::size_t full = std::size_t{1} << m;
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  std::vector<Scalar> dp(full * m, inf);
  std::vector<std::int8_t> parent(full * m, -1);
  for (int j = 0; j < m; ++j) dp[(std::size_t{1} << j) * m + j] = d(0, j + 1);
  for (std::size_t mask = 1; mask < full; ++mask) {
    for (int j = 0; j < m; ++j) {
      if (!(mask >> j & 1)) continue;
      const Scalar cur = dp[mask * m + j];
      if (cur == inf) continue;
      for (int k = 0; k < m; ++k) {
        if (mask >> k & 1) continue;
        const std::size_t next = mask | (std::size_t{1} << k);
        const Scalar cand = cur + d(j + 1, k + 1);
        if (cand < dp[next * m + k]) {
          dp[next * m + k] = cand;
          parent[next * m + k] = static_cast<std::int8_t>(j);
        }
      }
    }
  }
  Scalar best = inf;
  int last = 0;
  for (int j = 0; j < m; ++j) {
    const Scalar cand = dp[(full - 1) * m + j] + d(j + 1, 0);
    if (cand < best) {
      best = cand;
      last = j;
    }
  }
  std::vector<int> rev;
  std::size_t mask = full - 1;
  int cur = last;
  while (cur >= 0) {
    rev.push_back(cur + 1);
    const int prev = parent[mask * m + cur];
    mask &= ~(std::size_t{1} << cur);
    cur = prev;
  }
  FunctionalValue<Scalar> out;
  out.kind = FunctionalKind::TspExact;
  out.tour.push_back(0);
  out.tour.insert(out.tour.end(), rev.rbegin(), rev.rend());
  out.value = tour_length(pts, out.tour);
  return out;
}

/// Best of `restarts` randomized 2-opt descents; n >= 4. Restart r starts
/// from a random permutation drawn from streams.stream(r). Improvement
/// thresholds are relative, so scaling all points by a power of two scales
/// the result exactly.
template <typename Derived>
FunctionalValue<typename Derived::Scalar> tsp_2opt(const Eigen::MatrixBase<Derived>& pts, const SeedStream& streams,
                                                   int restarts = 20) {
  using Scalar = typename Derived::Scalar;
  const int n = static_cast<int>(pts.cols());
  if (n < 4) throw SizeError("tsp_2opt needs at least 4 points");
  if (restarts < 1) throw DomainError("tsp_2opt needs restarts >= 1");
  const auto d = distance_matrix(pts);
  FunctionalValue<Scalar> best;
  best.kind = FunctionalKind::Tsp2Opt;
  best.value = std::numeric_limits<Scalar>::infinity();
  for (int r = 0; r < restarts; ++r) {
    CounterRng rng = streams.stream(static_cast<std::uint64_t>(r));
    std::vector<int> t(n);
    std::iota(t.begin(), t.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(t[i], t[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    Scalar len = 0;
    for (int k = 0; k < n; ++k) len += d(t[k], t[(k + 1) % n]);
    bool improved = true;
    while (improved) {
      improved = false;
      for (int i = 0; i < n - 2; ++i) {
        for (int j = i + 2; j < n; ++j) {
          if (i == 0 && j == n - 1) continue;
          const int a = t[i], b = t[i + 1], c = t[j], e = t[(j + 1) % n];
          const Scalar delta = d(a, c) + d(b, e) - d(a, b) - d(c, e);
          if (delta < -Scalar(1e-12) * len) {
            std::reverse(t.begin() + i + 1, t.begin() + j + 1);
            len += delta;
            improved = true;
          }
        }
      }
    }
    // Rotate so the tour starts at vertex 0 for a canonical witness.
    std::rotate(t.begin(), std::find(t.begin(), t.end(), 0), t.end());
    const Scalar exact = tour_length(pts, t);
    if (exact < best.value) {
      best.value = exact;
      best.tour = t;
    }
  }
  return best;
}

/// Minimum-weight perfect matching by bitmask DP; n even, 2 <= n <= 16.
template <typename Derived>
FunctionalValue<typename Derived::Scalar> matching_exact(const Eigen::MatrixBase<Derived>& pts) {
  using Scalar = typename Derived::Scalar;
  const int n = static_cast<int>(pts.cols());
  if (n < 2 || n > kMatchingExactMax || n % 2 != 0) {
    throw SizeError("matching_exact needs an even number of points in [2, 16] (got " + std::to_string(n) + ")");
  }
  const auto d = distance_matrix(pts);
  const std::size_t full = std::size_t{1} << n;
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  std::vector<Scalar> dp(full, inf);
  std::vector<std::int8_t> first(full, -1);
  std::vector<std::int8_t> second(full, -1);
  dp[0] = 0;
  for (std::size_t mask = 0; mask + 1 < full; ++mask) {
    if (dp[mask] == inf) continue;
    int i = 0;
    while (mask >> i & 1) ++i;
    for (int j = i + 1; j < n; ++j) {
      if (mask >> j & 1) continue;
      const std::size_t next = mask | (std::size_t{1} << i) | (std::size_t{1} << j);
      const Scalar cand = dp[mask] + d(i, j);
      if (cand < dp[next]) {
        dp[next] = cand;
        first[next] = static_cast<std::int8_t>(i);
        second[next] = static_cast<std::int8_t>(j);
      }
    }
  }
  FunctionalValue<Scalar> out;
  out.kind = FunctionalKind::MatchingExact;
  for (std::size_t mask = full - 1; mask != 0;) {
    const int i = first[mask];
    const int j = second[mask];
    out.pairs.emplace_back(i, j);
    mask &= ~((std::size_t{1} << i) | (std::size_t{1} << j));
  }
  std::reverse(out.pairs.begin(), out.pairs.end());
  out.value = matching_length(pts, out.pairs);
  return out;
}

/// sum_i min_{j != i} |X_i - X_j|; n >= 2.
template <typename Derived>
FunctionalValue<typename Derived::Scalar> nn_sum(const Eigen::MatrixBase<Derived>& pts) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = pts.cols();
  if (n < 2) throw SizeError("nn_sum needs at least 2 points");
  FunctionalValue<Scalar> out;
  out.kind = FunctionalKind::NnSum;
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) best = std::min(best, (pts.col(i) - pts.col(j)).norm());
    }
    out.value += best;
  }
  return out;
}

struct FunctionalOptions {
  std::uint64_t seed = 0;  // 2-opt restarts draw from SeedStream(seed, 0)
  int restarts = 20;
};

template <typename Derived>
FunctionalValue<typename Derived::Scalar> evaluate(FunctionalKind kind, const Eigen::MatrixBase<Derived>& pts,
                                                   const FunctionalOptions& opts = {}) {
  switch (kind) {
    case FunctionalKind::TspExact:
      return tsp_exact(pts);
    case FunctionalKind::Tsp2Opt:
      return tsp_2opt(pts, SeedStream(opts.seed, 0), opts.restarts);
    case FunctionalKind::MatchingExact:
      return matching_exact(pts);
    case FunctionalKind::NnSum:
      return nn_sum(pts);
  }
  throw InternalError("unknown functional kind");
}

/// Longest edge of a tour or matching witness (0 when there is none).
template <typename Scalar>
Scalar max_witness_edge(const PointSet<Scalar>& pts, const FunctionalValue<Scalar>& v) {
  Scalar best = 0;
  for (std::size_t k = 0; k < v.tour.size(); ++k) {
    best = std::max<Scalar>(best, (pts.col(v.tour[k]) - pts.col(v.tour[(k + 1) % v.tour.size()])).norm());
  }
  for (auto [i, j] : v.pairs) best = std::max<Scalar>(best, (pts.col(i) - pts.col(j)).norm());
  return best;
}

struct ScalingCoupling {
  double L = 0.0;
  double L_prime = 0.0;             // L / (1 + eps)^r
  double L_prime_reevaluated = 0.0; // functional on the scaled points
  double eps = 0.0;
  double per_coordinate_affinity = 1.0;
  double coordinate_count = 0.0;
  double tv_bound = 0.0;
};

/// Relative agreement demanded between the identity and re-evaluation.
inline constexpr double kHomogeneityTolerance = 1e-9;

/// X' = X / (1 + alpha n^{-1/2}) applied to every coordinate of the n points.
/// The TV bound treats the n*dim coordinates as i.i.d. draws from `law`.
/// Throws InternalError when the functional fails to be r-homogeneous.
ScalingCoupling scaling_coupling(const PointSet<double>& pts, double alpha, double r, FunctionalKind kind,
                                 const Density1D& law, const FunctionalOptions& opts = {});

/// Same as above with a precomputed per-coordinate affinity (skips quadrature).
ScalingCoupling scaling_coupling(const PointSet<double>& pts, double alpha, double r, FunctionalKind kind,
                                 double per_coordinate_affinity, const FunctionalOptions& opts = {});

struct RheeCoupling {
  std::size_t m = 0;                       // first m points are kept fixed
  double ball_radius = 0.0;                // alpha n^{-1/2}
  double theta = 0.0;                      // beta n^{-1/2}
  std::vector<int> resample_indices;       // B, subset of {m, ..., n-1} (0-based)
  double vol_D_estimate = 1.0;
  double vol_D_stderr = 0.0;
  double exact_affinity_per_coordinate = 1.0;  // at vol_D_estimate
  double conservative_affinity = 1.0;          // at vol_D_estimate - 3 stderr
  std::size_t coordinate_count = 0;            // n - m
  double tv_bound = 0.0;                       // from the conservative affinity
};

struct RheeSample {
  PointSet<double> x;        // 2 x n
  PointSet<double> x_prime;  // 2 x n
  PointSet<double> y;        // 2 x n; columns m..n-1 hold the uniform-on-D proposals
  RheeCoupling coupling;
};

inline constexpr std::size_t kRheeVolumeProbes = 100000;
inline constexpr std::size_t kRheeRejectionBudget = 1000000;

/// Affinity between the uniform law on the unit square and the mixture
/// (1 - theta) U + theta U_D, with v = Vol(D):
/// (1 - v) sqrt(1 - theta) + v sqrt(1 - theta + theta / v).
double rhee_affinity(double vol, double theta);

/// Uniform points on [0,1]^2 and Rhee's resampling coupling. Stream layout:
/// point i uses stream i, the mixing decision and proposal for i use stream
/// n + i, the volume probes use stream 2n.
RheeSample rhee_coupling_sample(std::size_t n, double alpha, double beta, const SeedStream& streams);

/// L - L' for the coupled pair under one functional.
double rhee_gap_statistics(const RheeSample& sample, FunctionalKind kind, const FunctionalOptions& opts = {});

/// 2 sum_{i in B} (|X_i - Y_i| + max_edge): replacing X_i by Y_i in a witness
/// changes its length by at most twice the displacement.
double rhee_surgery_bound(const RheeSample& sample, double max_edge);

}  // namespace anticonc
