#include "anticonc/fpp.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <string>

#include "anticonc/coupling.hpp"
#include "anticonc/errors.hpp"
#include "anticonc/quadrature.hpp"

namespace anticonc {

std::size_t FppGrid::edge_count(int width, int height) noexcept {
  const auto w = static_cast<std::size_t>(width);
  const auto h = static_cast<std::size_t>(height);
  return (w - 1) * h + w * (h - 1);
}

FppGrid::FppGrid(int width, int height, Eigen::VectorXd weights, Vertex source, Vertex target)
    : width_(width), height_(height), weights_(std::move(weights)), source_(source), target_(target) {
  if (width < 1 || height < 1 || (width == 1 && height == 1)) throw SizeError("FppGrid: box needs at least 2 vertices");
  if (static_cast<std::size_t>(weights_.size()) != edge_count()) {
    throw ShapeError("FppGrid: expected " + std::to_string(edge_count()) + " edge weights, got " +
                     std::to_string(weights_.size()));
  }
  for (Eigen::Index e = 0; e < weights_.size(); ++e) {
    if (!(weights_[e] > 0.0) || !std::isfinite(weights_[e])) {
      throw DomainError("FppGrid: edge weight " + std::to_string(e) + " is not a positive finite number");
    }
  }
  if (!contains(source_) || !contains(target_)) throw DomainError("FppGrid: source or target outside the box");
  if (source_ == target_) throw DomainError("FppGrid: source equals target");
}

Edge FppGrid::edge(std::size_t e) const {
  const auto h = static_cast<std::size_t>(height_);
  const std::size_t horizontal = static_cast<std::size_t>(width_ - 1) * h;
  if (e < horizontal) {
    const Vertex a{static_cast<int>(e / h), static_cast<int>(e % h)};
    return {a, {a.x + 1, a.y}};
  }
  const std::size_t k = e - horizontal;
  if (k >= static_cast<std::size_t>(width_) * (h - 1)) throw ShapeError("FppGrid: edge index out of range");
  const Vertex a{static_cast<int>(k / (h - 1)), static_cast<int>(k % (h - 1))};
  return {a, {a.x, a.y + 1}};
}

long FppGrid::edge_between(Vertex u, Vertex v) const noexcept {
  if (!contains(u) || !contains(v)) return -1;
  if (v < u) std::swap(u, v);
  const long h = height_;
  if (u.y == v.y && v.x == u.x + 1) return static_cast<long>(u.x) * h + u.y;
  if (u.x == v.x && v.y == u.y + 1) return static_cast<long>(width_ - 1) * h + static_cast<long>(u.x) * (h - 1) + u.y;
  return -1;
}

FppGrid FppGrid::with_weights(Eigen::VectorXd weights) const {
  return FppGrid(width_, height_, std::move(weights), source_, target_);
}

FppGrid make_box(int n, const Density1D& law, const SeedStream& streams) {
  if (n < 2 || n > 512 || n % 2 != 0) throw SizeError("make_box: n must be even and lie in [2, 512]");
  if (!law.half_line()) throw DomainError("make_box: edge weights need a half-line density");
  const int side = 2 * n + 1;
  Eigen::VectorXd w(static_cast<Eigen::Index>(FppGrid::edge_count(side, side)));
  for (Eigen::Index e = 0; e < w.size(); ++e) {
    CounterRng rng = streams.stream(static_cast<std::uint64_t>(e));
    double x = law.sample(rng);
    while (!(x > 0.0)) x = law.sample(rng);
    w[e] = x;
  }
  return FppGrid(side, side, std::move(w), {n / 2, n}, {3 * n / 2, n});
}

GeodesicResult passage_time(const FppGrid& grid) {
  const std::size_t nv = grid.vertex_count();
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<double> dist(nv, inf);
  std::vector<std::size_t> pred(nv, none);
  std::vector<char> done(nv, 0);

  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  const std::size_t s = grid.vertex_id(grid.source());
  const std::size_t t = grid.vertex_id(grid.target());
  dist[s] = 0.0;
  heap.emplace(0.0, s);
  constexpr int dx[4] = {-1, 0, 0, 1};
  constexpr int dy[4] = {0, -1, 1, 0};
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (done[u]) continue;
    done[u] = 1;
    if (u == t) break;
    const Vertex uv = grid.vertex(u);
    for (int k = 0; k < 4; ++k) {
      const Vertex w{uv.x + dx[k], uv.y + dy[k]};
      if (!grid.contains(w)) continue;
      const std::size_t v = grid.vertex_id(w);
      if (done[v]) continue;
      const double alt = d + grid.weight(static_cast<std::size_t>(grid.edge_between(uv, w)));
      if (alt < dist[v] || (alt == dist[v] && u < pred[v])) {
        dist[v] = alt;
        pred[v] = u;
        heap.emplace(alt, v);
      }
    }
  }
  if (!done[t]) throw InternalError("passage_time: target unreachable");

  GeodesicResult out;
  out.passage_time = dist[t];
  for (std::size_t v = t; v != none; v = pred[v]) out.path.push_back(grid.vertex(v));
  std::reverse(out.path.begin(), out.path.end());
  for (std::size_t i = 0; i + 1 < out.path.size(); ++i) {
    out.edge_list.push_back(static_cast<std::size_t>(grid.edge_between(out.path[i], out.path[i + 1])));
  }
  for (const Vertex& v : out.path) {
    if (v.x == 0 || v.y == 0 || v.x == grid.width() - 1 || v.y == grid.height() - 1) out.touches_boundary = true;
  }
  return out;
}

int edge_distance(const FppGrid& grid, std::size_t e) {
  const Edge ed = grid.edge(e);
  const Vertex s = grid.source();
  auto l1 = [&](Vertex v) { return std::abs(v.x - s.x) + std::abs(v.y - s.y); };
  return std::min(l1(ed.a), l1(ed.b));
}

EpsSchedule graded_schedule(const FppGrid& grid, double alpha, double n) {
  if (!(n >= 5.0)) throw DomainError("graded_schedule: n must be >= 5");
  if (!(alpha >= 0.0)) throw DomainError("graded_schedule: alpha must be >= 0");
  EpsSchedule sched;
  sched.kind = ScheduleKind::DistanceGraded;
  sched.alpha = alpha;
  sched.n = n;
  const double root_log = std::sqrt(std::log(n));
  sched.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.edge_count()));
  for (std::size_t e = 0; e < grid.edge_count(); ++e) {
    const int k = edge_distance(grid, e);
    if (k <= n / 2.0) sched.values[static_cast<Eigen::Index>(e)] = alpha / ((k + 1) * root_log);
  }
  return sched;
}

namespace {

double segment_distance(double px, double py, Vertex a, Vertex b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double wx = px - a.x, wy = py - a.y;
  const double t = std::clamp((vx * wx + vy * wy) / (vx * vx + vy * vy), 0.0, 1.0);
  return std::hypot(wx - t * vx, wy - t * vy);
}

}  // namespace

EpsSchedule corridor_schedule(const FppGrid& grid, double alpha, double n, double slack) {
  if (!(slack > 0.0)) throw DomainError("corridor_schedule: slack must be > 0");
  if (!(n > 1.0)) throw DomainError("corridor_schedule: n must be > 1");
  if (!(alpha >= 0.0)) throw DomainError("corridor_schedule: alpha must be >= 0");
  EpsSchedule sched;
  sched.kind = ScheduleKind::Corridor;
  sched.alpha = alpha;
  sched.n = n;
  sched.slack = slack;
  sched.corridor_width = std::pow(n, 0.75 + 2.0 * slack);
  const double eps = alpha * std::pow(n, -0.875 - slack);
  const Vertex s = grid.source(), t = grid.target();
  const int margin = std::min({std::min(s.x, t.x), std::min(s.y, t.y), grid.width() - 1 - std::max(s.x, t.x),
                               grid.height() - 1 - std::max(s.y, t.y)});
  sched.clipped = sched.corridor_width > margin;
  sched.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.edge_count()));
  for (std::size_t e = 0; e < grid.edge_count(); ++e) {
    const Edge ed = grid.edge(e);
    if (segment_distance(ed.a.x, ed.a.y, s, t) <= sched.corridor_width &&
        segment_distance(ed.b.x, ed.b.y, s, t) <= sched.corridor_width) {
      sched.values[static_cast<Eigen::Index>(e)] = eps;
    }
  }
  return sched;
}

FppGrid perturb(const FppGrid& grid, const EpsSchedule& sched) {
  if (static_cast<std::size_t>(sched.values.size()) != grid.edge_count()) {
    throw ShapeError("perturb: schedule does not cover the grid edges");
  }
  return grid.with_weights(grid.weights().cwiseQuotient((1.0 + sched.values.array()).matrix()));
}

double schedule_log_affinity(const EpsSchedule& sched, const Density1D& law) {
  std::map<double, std::size_t> counts;
  for (Eigen::Index e = 0; e < sched.values.size(); ++e) {
    if (sched.values[e] > 0.0) ++counts[sched.values[e]];
  }
  double log_rho = 0.0;
  for (const auto& [eps, count] : counts) {
    const double rho = scaled_affinity(law, eps).rho;
    if (rho <= 0.0) return -std::numeric_limits<double>::infinity();
    log_rho += static_cast<double>(count) * std::log(std::min(rho, 1.0));
  }
  return log_rho;
}

double schedule_tv_bound(const EpsSchedule& sched, const Density1D& law) {
  const double log_rho = schedule_log_affinity(sched, law);
  return std::isinf(log_rho) ? 1.0 : tv_from_log_affinity(log_rho);
}

double schedule_square_sum(const EpsSchedule& sched) { return sched.values.squaredNorm(); }

double ttq_lower_bound(const GeodesicResult& geo, const FppGrid& grid, const EpsSchedule& sched, std::size_t m) {
  if (m > geo.edge_list.size()) throw DomainError("ttq_lower_bound: m exceeds geodesic length");
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t e = geo.edge_list[i];
    const double eps = sched.values[static_cast<Eigen::Index>(e)];
    total += eps * grid.weight(e) / (1.0 + eps);
  }
  return total;
}

CorridorCheck corridor_check(const GeodesicResult& geo, const EpsSchedule& sched, double perturbed_time) {
  CorridorCheck out;
  const double eps = sched.alpha * std::pow(sched.n, -0.875 - sched.slack);
  out.ceiling = geo.passage_time / (1.0 + eps);
  out.contained = eps > 0.0 && std::all_of(geo.edge_list.begin(), geo.edge_list.end(), [&](std::size_t e) {
                    return sched.values[static_cast<Eigen::Index>(e)] == eps;
                  });
  out.holds = !out.contained || perturbed_time <= out.ceiling + 1e-10 * std::max(1.0, out.ceiling);
  return out;
}

double phi_laplace(const Density1D& law, double theta) {
  if (!law.half_line()) throw DomainError("phi_laplace: needs a half-line density");
  if (!(theta >= 0.0)) throw DomainError("phi_laplace: theta must be >= 0");
  const std::vector<double> panels = support_panels(true);
  const QuadratureResult q =
      integrate_panels([&](double x) { return std::exp(-theta * x - law.V(x)); }, panels);
  if (!(q.error <= kAffinityTolerance)) {
    throw NumericError("phi_laplace: quadrature error estimate too large", q.value, q.error);
  }
  return q.value;
}

double path_weight_tail(const Density1D& law, int r, double b) {
  if (r < 1) throw DomainError("path_weight_tail: r must be >= 1");
  if (!(b > 0.0)) throw DomainError("path_weight_tail: b must be > 0");
  const double factor = std::numbers::e * phi_laplace(law, 1.0 / b);
  if (factor >= 1.0) return 1.0;
  return std::pow(factor, r);
}

}  // namespace anticonc
