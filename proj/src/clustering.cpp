#include "fibrow/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_map>

#include "fibrow/errors.hpp"
#include "fibrow/rng.hpp"

namespace fibrow {

namespace {

// Uniform hash grid with cell size eps; neighbor queries touch 3x3 cells.
class NeighborGrid {
 public:
  NeighborGrid(const std::vector<Vec2>& points, double eps)
      : points_(points), inv_cell_(1.0 / eps), eps2_(eps * eps) {
    cells_.reserve(points.size());
    for (size_t i = 0; i < points.size(); ++i)
      cells_[key(points[i])].push_back(static_cast<int>(i));
  }

  // Indices within eps of points_[q], in ascending index order, q included.
  void query(int q, std::vector<int>& out) const {
    out.clear();
    const Vec2& p = points_[static_cast<size_t>(q)];
    const int cx = cell_coord(p.x);
    const int cy = cell_coord(p.y);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const auto it = cells_.find(pack(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (int idx : it->second)
          if (distance2(points_[static_cast<size_t>(idx)], p) <= eps2_)
            out.push_back(idx);
      }
    std::sort(out.begin(), out.end());
  }

 private:
  int cell_coord(double v) const {
    return static_cast<int>(std::floor(v * inv_cell_));
  }
  static int64_t pack(int x, int y) {
    return (static_cast<int64_t>(x) << 32) ^ static_cast<uint32_t>(y);
  }
  int64_t key(const Vec2& p) const {
    return pack(cell_coord(p.x), cell_coord(p.y));
  }

  const std::vector<Vec2>& points_;
  double inv_cell_;
  double eps2_;
  std::unordered_map<int64_t, std::vector<int>> cells_;
};

}  // namespace

ClusterLabeling dbscan(const std::vector<Vec2>& points, double eps,
                       int min_pts) {
  if (eps <= 0.0) fail(Errc::config_invalid, "dbscan: eps must be > 0");
  if (min_pts < 1) fail(Errc::config_invalid, "dbscan: min_pts must be >= 1");

  const int n = static_cast<int>(points.size());
  ClusterLabeling result;
  result.labels.assign(static_cast<size_t>(n), ClusterLabeling::kNoise);
  if (n == 0) return result;

  NeighborGrid grid(points, eps);
  std::vector<bool> visited(static_cast<size_t>(n), false);
  std::vector<int> neighbors, expansion;

  int cluster = 0;
  for (int i = 0; i < n; ++i) {
    if (visited[static_cast<size_t>(i)]) continue;
    visited[static_cast<size_t>(i)] = true;
    grid.query(i, neighbors);
    if (static_cast<int>(neighbors.size()) < min_pts) continue;  // noise

    result.labels[static_cast<size_t>(i)] = cluster;
    std::deque<int> frontier(neighbors.begin(), neighbors.end());
    while (!frontier.empty()) {
      const int j = frontier.front();
      frontier.pop_front();
      if (result.labels[static_cast<size_t>(j)] == ClusterLabeling::kNoise)
        result.labels[static_cast<size_t>(j)] = cluster;  // border point
      if (visited[static_cast<size_t>(j)]) continue;
      visited[static_cast<size_t>(j)] = true;
      result.labels[static_cast<size_t>(j)] = cluster;
      grid.query(j, expansion);
      if (static_cast<int>(expansion.size()) >= min_pts)
        for (int idx : expansion) frontier.push_back(idx);
    }
    ++cluster;
  }
  result.cluster_count = cluster;
  return result;
}

std::vector<Vec2> kmeans(const std::vector<Vec2>& points, int k, uint64_t seed,
                         int max_iter, const std::vector<double>& weights) {
  const int n = static_cast<int>(points.size());
  if (k < 1) fail(Errc::config_invalid, "kmeans: k must be >= 1");
  if (k > n) fail(Errc::k_too_large, "kmeans: k exceeds point count");
  if (!weights.empty() && static_cast<int>(weights.size()) != n)
    fail(Errc::shape_mismatch, "kmeans: weights size mismatch");

  const auto weight_of = [&](int i) {
    return weights.empty() ? 1.0 : weights[static_cast<size_t>(i)];
  };

  // k-means++ seeding.
  SplitMix64 rng(seed);
  std::vector<Vec2> centers;
  centers.reserve(static_cast<size_t>(k));
  centers.push_back(points[rng.next_below(static_cast<uint64_t>(n))]);
  std::vector<double> d2(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i)
    d2[static_cast<size_t>(i)] = distance2(points[static_cast<size_t>(i)],
                                           centers[0]);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (int i = 0; i < n; ++i)
      total += d2[static_cast<size_t>(i)] * weight_of(i);
    int chosen = -1;
    if (total > 0.0) {
      const double r = rng.next_double() * total;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += d2[static_cast<size_t>(i)] * weight_of(i);
        if (acc >= r) {
          chosen = i;
          break;
        }
      }
      if (chosen < 0) chosen = n - 1;
    } else {
      // All mass already covered (duplicate points); take the first point
      // not yet chosen as a center.
      for (int i = 0; i < n && chosen < 0; ++i) {
        bool taken = false;
        for (const auto& c : centers)
          if (c == points[static_cast<size_t>(i)]) taken = true;
        if (!taken) chosen = i;
      }
      if (chosen < 0) chosen = 0;
    }
    centers.push_back(points[static_cast<size_t>(chosen)]);
    for (int i = 0; i < n; ++i)
      d2[static_cast<size_t>(i)] =
          std::min(d2[static_cast<size_t>(i)],
                   distance2(points[static_cast<size_t>(i)], centers.back()));
  }

  // Lloyd iterations until the assignment stops changing.
  std::vector<int> assign(static_cast<size_t>(n), -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double d = distance2(points[static_cast<size_t>(i)],
                                   centers[static_cast<size_t>(c)]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      if (assign[static_cast<size_t>(i)] != best_c) {
        assign[static_cast<size_t>(i)] = best_c;
        changed = true;
      }
    }
    if (!changed) break;

    std::vector<Vec2> sums(static_cast<size_t>(k));
    std::vector<double> mass(static_cast<size_t>(k), 0.0);
    for (int i = 0; i < n; ++i) {
      const double w = weight_of(i);
      const int c = assign[static_cast<size_t>(i)];
      sums[static_cast<size_t>(c)] =
          sums[static_cast<size_t>(c)] + points[static_cast<size_t>(i)] * w;
      mass[static_cast<size_t>(c)] += w;
    }
    for (int c = 0; c < k; ++c) {
      if (mass[static_cast<size_t>(c)] > 0.0) {
        centers[static_cast<size_t>(c)] =
            sums[static_cast<size_t>(c)] * (1.0 / mass[static_cast<size_t>(c)]);
      } else {
        // Empty cluster: restart it at the point farthest from its center.
        double worst = -1.0;
        int worst_i = 0;
        for (int i = 0; i < n; ++i) {
          const double d = distance2(
              points[static_cast<size_t>(i)],
              centers[static_cast<size_t>(assign[static_cast<size_t>(i)])]);
          if (d > worst) {
            worst = d;
            worst_i = i;
          }
        }
        centers[static_cast<size_t>(c)] = points[static_cast<size_t>(worst_i)];
      }
    }
  }

  std::sort(centers.begin(), centers.end(), [](const Vec2& a, const Vec2& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  return centers;
}

}  // namespace fibrow
