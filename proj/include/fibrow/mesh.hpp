#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fibrow/geometry.hpp"
#include "fibrow/rng.hpp"

namespace fibrow {

// Triangle mesh with an optional per-vertex region mask (the brow-bone
// region). An empty mask means every vertex is in the region.
struct TriMesh {
  std::vector<Point3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<uint8_t> mask;

  bool vertex_in_region(int v) const {
    return mask.empty() || mask[static_cast<size_t>(v)] != 0;
  }
  // A triangle belongs to the region when all three corners do.
  bool triangle_in_region(int t) const {
    const auto& tri = triangles[static_cast<size_t>(t)];
    return vertex_in_region(tri[0]) && vertex_in_region(tri[1]) &&
           vertex_in_region(tri[2]);
  }
};

double triangle_area(const Point3& a, const Point3& b, const Point3& c);
Box3 bounds(const TriMesh& mesh);

// Throws on out-of-range indices or (optionally) degenerate triangles.
void validate_mesh(const TriMesh& mesh, bool allow_degenerate = false);

// Every edge shared by exactly two triangles.
bool is_watertight(const TriMesh& mesh);

// Parity ray test against a watertight mesh; surface points count as inside.
// Call is_watertight (or mesh_cut_ender, which does) before trusting this.
bool point_in_mesh(const TriMesh& mesh, const Point3& p);

// Incremental area-weighted surface sampler. Deterministic for a fixed seed.
class SurfaceSampler {
 public:
  // Throws empty_region when region_only selects no triangle.
  SurfaceSampler(const TriMesh& mesh, bool region_only, uint64_t seed);

  Point3 next();
  // Triangle index (into mesh.triangles) of the most recent sample.
  int last_triangle() const { return last_triangle_; }

 private:
  const TriMesh& mesh_;
  std::vector<int> tri_index_;
  std::vector<double> cum_area_;
  SplitMix64 rng_;
  int last_triangle_ = -1;
};

// Area-weighted uniform samples on the (masked) surface.
std::vector<Point3> sample_surface(const TriMesh& mesh, int count,
                                   bool region_only, uint64_t seed);

}  // namespace fibrow
