#include "fibrow/rootfind.hpp"

#include <algorithm>
#include <limits>

#include "fibrow/errors.hpp"

namespace fibrow {

std::vector<Root2D> extract_roots_2d(const DensityMap& map, double tau,
                                     const ExtractParams& params) {
  if (map.max_value() <= 0.0f) return {};  // no signal anywhere
  const std::vector<Root2D> candidates = threshold_candidates(map, tau);
  if (candidates.empty()) return {};

  const ClusterLabeling labeling =
      dbscan(candidates, params.eps, params.min_pts);
  if (labeling.cluster_count == 0) return {};

  std::vector<double> weights;
  if (params.weight_by_density) {
    weights.reserve(candidates.size());
    for (const auto& c : candidates)
      weights.push_back(map.at(static_cast<int>(c.x), static_cast<int>(c.y)));
  }

  std::vector<Root2D> centers;
  if (params.global_kmeans) {
    std::vector<Vec2> members;
    std::vector<double> member_weights;
    for (size_t i = 0; i < candidates.size(); ++i) {
      if (labeling.labels[i] == ClusterLabeling::kNoise) continue;
      members.push_back(candidates[i]);
      if (!weights.empty()) member_weights.push_back(weights[i]);
    }
    centers = kmeans(members, labeling.cluster_count, params.seed, 100,
                     member_weights);
  } else {
    for (int c = 0; c < labeling.cluster_count; ++c) {
      std::vector<Vec2> members;
      std::vector<double> member_weights;
      for (size_t i = 0; i < candidates.size(); ++i) {
        if (labeling.labels[i] != c) continue;
        members.push_back(candidates[i]);
        if (!weights.empty()) member_weights.push_back(weights[i]);
      }
      const auto cs = kmeans(members, 1, params.seed, 100, member_weights);
      centers.push_back(cs.front());
    }
    std::sort(centers.begin(), centers.end(),
              [](const Vec2& a, const Vec2& b) {
                return a.x != b.x ? a.x < b.x : a.y < b.y;
              });
  }
  return centers;
}

std::vector<Root2D> extract_roots_2d(const DensityMap& map, double tau,
                                     double eps, int min_pts, uint64_t seed) {
  ExtractParams params;
  params.eps = eps;
  params.min_pts = min_pts;
  params.seed = seed;
  return extract_roots_2d(map, tau, params);
}

RootSet lift_roots(const std::vector<Root2D>& roots2d, const Camera& camera,
                   const TriMesh& mesh, int sample_count, uint64_t seed) {
  if (sample_count < 1)
    fail(Errc::config_invalid, "lift_roots: sample_count must be >= 1");
  const std::vector<Point3> samples =
      sample_surface(mesh, sample_count, /*region_only=*/true, seed);

  // Project once; samples behind a perspective camera are unusable.
  std::vector<Vec2> projected(samples.size());
  std::vector<bool> usable(samples.size(), false);
  bool any_usable = false;
  for (size_t i = 0; i < samples.size(); ++i) {
    if (camera.mode == CameraMode::perspective &&
        camera.to_camera(samples[i]).z <= 1e-9)
      continue;
    projected[i] = project(camera, samples[i]);
    usable[i] = true;
    any_usable = true;
  }
  if (!any_usable)
    fail(Errc::all_samples_behind_camera,
         "lift_roots: every surface sample is behind the camera");

  RootSet out;
  out.roots.reserve(roots2d.size());
  for (const auto& r : roots2d) {
    double best = std::numeric_limits<double>::max();
    size_t best_i = 0;
    for (size_t i = 0; i < samples.size(); ++i) {
      if (!usable[i]) continue;
      const double d = distance2(projected[i], r);
      if (d < best) {  // strict: ties keep the lowest sample index
        best = d;
        best_i = i;
      }
    }
    out.roots.push_back(samples[best_i]);
  }
  return out;
}

}  // namespace fibrow
