#pragma once

#include <cstdint>
#include <vector>

#include "fibrow/geometry.hpp"

namespace fibrow {

// DBSCAN output: one label per input point. Cluster ids are contiguous from
// 0 in seed-scan order; noise points carry kNoise.
struct ClusterLabeling {
  static constexpr int kNoise = -1;
  std::vector<int> labels;
  int cluster_count = 0;
};

// Density-reachability clustering. Deterministic for a given input order:
// seed points are scanned in index order and neighborhoods expanded in index
// order.
ClusterLabeling dbscan(const std::vector<Vec2>& points, double eps,
                       int min_pts);

// Lloyd iterations from k-means++ seeding (fixed seed), run to an assignment
// fixpoint or max_iter. Centers are returned sorted by (x, y). Optional
// per-point weights bias both seeding and the centroid updates.
std::vector<Vec2> kmeans(const std::vector<Vec2>& points, int k, uint64_t seed,
                         int max_iter = 100,
                         const std::vector<double>& weights = {});

}  // namespace fibrow
