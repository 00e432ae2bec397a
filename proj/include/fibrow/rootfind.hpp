#pragma once

#include <cstdint>
#include <vector>

#include "fibrow/camera.hpp"
#include "fibrow/clustering.hpp"
#include "fibrow/density.hpp"
#include "fibrow/fiber.hpp"
#include "fibrow/mesh.hpp"

namespace fibrow {

struct ExtractParams {
  double eps = 3.0;
  int min_pts = 4;
  uint64_t seed = 0;
  // Weight candidate pixels by their density value in K-Means.
  bool weight_by_density = false;
  // One global K-Means with k from DBSCAN instead of per-cluster centers.
  // See extract_roots_2d below for why per-cluster is the default.
  bool global_kmeans = false;
};

// Density map -> 2D root centers: threshold at tau, count clusters with
// DBSCAN, then place one center per cluster with K-Means. By default K-Means
// runs per DBSCAN cluster (k = 1, i.e. the cluster centroid); noise points
// never reach K-Means. A single global K-Means over all candidates with
// k = cluster_count is available behind global_kmeans, but its k-means++
// seeding misplaces centers with high probability once clusters are only a
// few footprint radii apart, so it is not the default. Centers are sorted by
// (u, v). Returns an empty list when no cluster survives.
std::vector<Root2D> extract_roots_2d(const DensityMap& map, double tau,
                                     const ExtractParams& params = {});

// Spec-shaped convenience overload.
std::vector<Root2D> extract_roots_2d(const DensityMap& map, double tau,
                                     double eps, int min_pts, uint64_t seed);

// Lift each 2D root to the 3D surface sample whose projection is nearest in
// the image; ties break to the lowest sample index. Samples behind a
// perspective camera are skipped; all behind -> all_samples_behind_camera.
RootSet lift_roots(const std::vector<Root2D>& roots2d, const Camera& camera,
                   const TriMesh& mesh, int sample_count, uint64_t seed);

}  // namespace fibrow
