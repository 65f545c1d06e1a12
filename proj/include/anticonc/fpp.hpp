#pragma once

// First-passage percolation on finite boxes of Z^2.

#include <compare>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "anticonc/densities.hpp"
#include "anticonc/rng.hpp"

namespace anticonc {

struct Vertex {
  int x = 0;
  int y = 0;
  auto operator<=>(const Vertex&) const = default;
};

/// Nearest-neighbour edge with a < b lexicographically.
struct Edge {
  Vertex a;
  Vertex b;
};

/// Vertices {0..width-1} x {0..height-1}. Horizontal edges are numbered
/// first (x-major), then vertical edges (x-major).
class FppGrid {
 public:
  FppGrid(int width, int height, Eigen::VectorXd weights, Vertex source, Vertex target);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t vertex_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
  std::size_t edge_count() const noexcept { return edge_count(width_, height_); }
  static std::size_t edge_count(int width, int height) noexcept;

  Vertex source() const noexcept { return source_; }
  Vertex target() const noexcept { return target_; }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }
  double weight(std::size_t e) const { return weights_[static_cast<Eigen::Index>(e)]; }

  bool contains(Vertex v) const noexcept { return v.x >= 0 && v.y >= 0 && v.x < width_ && v.y < height_; }
  std::size_t vertex_id(Vertex v) const noexcept {
    return static_cast<std::size_t>(v.x) * static_cast<std::size_t>(height_) + static_cast<std::size_t>(v.y);
  }
  Vertex vertex(std::size_t id) const noexcept {
    return {static_cast<int>(id / static_cast<std::size_t>(height_)), static_cast<int>(id % static_cast<std::size_t>(height_))};
  }
  Edge edge(std::size_t e) const;
  /// Index of the edge joining u and v; -1 if they are not neighbours in the box.
  long edge_between(Vertex u, Vertex v) const noexcept;

  FppGrid with_weights(Eigen::VectorXd weights) const;

 private:
  int width_;
  int height_;
  Eigen::VectorXd weights_;
  Vertex source_;
  Vertex target_;
};

/// Box of side 2n ((2n+1)^2 vertices) with i.i.d. weights from `law`; edge e
/// uses stream e. Source (n/2, n), target (3n/2, n). n even, 2 <= n <= 512.
FppGrid make_box(int n, const Density1D& law, const SeedStream& streams);

struct GeodesicResult {
  double passage_time = 0.0;
  std::vector<Vertex> path;
  std::vector<std::size_t> edge_list;
  bool touches_boundary = false;
};

/// Dijkstra from source to target. Among equal-time predecessors the
/// lexicographically smallest vertex wins.
GeodesicResult passage_time(const FppGrid& grid);

enum class ScheduleKind { DistanceGraded, Corridor };

struct EpsSchedule {
  ScheduleKind kind = ScheduleKind::DistanceGraded;
  Eigen::VectorXd values;  // per edge
  double alpha = 0.0;
  double n = 0.0;
  double slack = 0.0;           // corridor only
  double corridor_width = 0.0;  // corridor only
  bool clipped = false;         // corridor reaches the box boundary
};

/// k(e): L1 distance from the source to the nearer endpoint of e.
int edge_distance(const FppGrid& grid, std::size_t e);

/// eps_e = alpha / ((k(e)+1) sqrt(log n)) for k(e) <= n/2, else 0. n >= 5, alpha >= 0.
EpsSchedule graded_schedule(const FppGrid& grid, double alpha, double n);

/// eps = alpha n^{-7/8-slack} on edges with both endpoints within n^{3/4+2 slack}
/// of the source-target segment, else 0.
EpsSchedule corridor_schedule(const FppGrid& grid, double alpha, double n, double slack);

/// Weights w_e / (1 + eps_e).
FppGrid perturb(const FppGrid& grid, const EpsSchedule& sched);

/// Sum over edges with eps_e > 0 of log scaled_affinity(law, eps_e).
double schedule_log_affinity(const EpsSchedule& sched, const Density1D& law);

/// Product Hellinger TV bound over the edges with eps_e > 0 for weights drawn from `law`.
double schedule_tv_bound(const EpsSchedule& sched, const Density1D& law);

double schedule_square_sum(const EpsSchedule& sched);

/// Sum over the first m geodesic edges of eps w / (1 + eps).
double ttq_lower_bound(const GeodesicResult& geo, const FppGrid& grid, const EpsSchedule& sched, std::size_t m);

struct CorridorCheck {
  bool contained = false;  // every geodesic edge carries the corridor eps
  double ceiling = 0.0;    // T / (1 + eps)
  bool holds = true;       // T' <= ceiling whenever contained
};

CorridorCheck corridor_check(const GeodesicResult& geo, const EpsSchedule& sched, double perturbed_time);

/// Laplace transform E exp(-theta w) of a half-line law by quadrature.
double phi_laplace(const Density1D& law, double theta);

/// min(1, (e phi(1/b))^r), an upper bound on P(w_1 + ... + w_r <= b r).
double path_weight_tail(const Density1D& law, int r, double b);

}  // namespace anticonc
