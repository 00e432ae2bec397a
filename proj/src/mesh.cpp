#include "fibrow/mesh.hpp"

#include <algorithm>
#include <unordered_map>

#include "fibrow/errors.hpp"

namespace fibrow {

double triangle_area(const Point3& a, const Point3& b, const Point3& c) {
  return 0.5 * cross(b - a, c - a).norm();
}

Box3 bounds(const TriMesh& mesh) {
  Box3 box;
  for (const auto& v : mesh.vertices) box.grow(v);
  return box;
}

void validate_mesh(const TriMesh& mesh, bool allow_degenerate) {
  const int n = static_cast<int>(mesh.vertices.size());
  if (!mesh.mask.empty() && mesh.mask.size() != mesh.vertices.size())
    fail(Errc::schema_error, "mesh: mask size does not match vertex count");
  for (const auto& tri : mesh.triangles) {
    for (int idx : tri)
      if (idx < 0 || idx >= n)
        fail(Errc::index_out_of_range, "mesh: triangle index out of range");
    if (!allow_degenerate &&
        triangle_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                      mesh.vertices[tri[2]]) <= 0.0)
      fail(Errc::schema_error, "mesh: degenerate triangle");
  }
}

namespace {

uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<uint64_t>(a) << 32) | static_cast<uint32_t>(b);
}

}  // namespace

bool is_watertight(const TriMesh& mesh) {
  if (mesh.triangles.size() < 4) return false;
  std::unordered_map<uint64_t, int> edge_count;
  edge_count.reserve(mesh.triangles.size() * 3);
  for (const auto& tri : mesh.triangles) {
    edge_count[edge_key(tri[0], tri[1])]++;
    edge_count[edge_key(tri[1], tri[2])]++;
    edge_count[edge_key(tri[2], tri[0])]++;
  }
  for (const auto& [key, count] : edge_count)
    if (count != 2) return false;
  return true;
}

namespace {

enum class RayHit { miss, hit, unstable };

// Moller-Trumbore with a guard band: intersections too close to a triangle
// edge or to the ray origin make the parity count untrustworthy.
RayHit ray_triangle(const Point3& origin, const Vec3& dir, const Point3& v0,
                    const Point3& v1, const Point3& v2) {
  const Vec3 e1 = v1 - v0;
  const Vec3 e2 = v2 - v0;
  const Vec3 pvec = cross(dir, e2);
  const double det = dot(e1, pvec);
  if (std::abs(det) < 1e-14) return RayHit::miss;  // parallel
  const double inv_det = 1.0 / det;
  const Vec3 tvec = origin - v0;
  const double u = dot(tvec, pvec) * inv_det;
  const Vec3 qvec = cross(tvec, e1);
  const double v = dot(dir, qvec) * inv_det;
  const double w = 1.0 - u - v;
  const double t = dot(e2, qvec) * inv_det;
  const double eps = 1e-10;
  if (u < -eps || v < -eps || w < -eps) return RayHit::miss;
  if (t < -eps) return RayHit::miss;
  if (u < eps || v < eps || w < eps || std::abs(t) < eps)
    return RayHit::unstable;
  return RayHit::hit;
}

}  // namespace

bool point_in_mesh(const TriMesh& mesh, const Point3& p) {
  static const Vec3 directions[] = {
      normalized({0.5373618297, 0.7159187052, 0.4455559734}),
      normalized({-0.6217382501, 0.4914098301, 0.6096237329}),
      normalized({0.2184910231, -0.8361849270, 0.5030972631}),
      normalized({0.8031975319, 0.1093381410, -0.5856109734}),
      normalized({-0.3317815301, -0.5531874219, -0.7641258817}),
      normalized({0.0912733915, 0.9342185912, -0.3448129184}),
      normalized({-0.7513190241, -0.0981258319, 0.6525983212}),
      normalized({0.4428190741, -0.3301982565, -0.8335813452}),
  };
  bool parity = false;
  for (const Vec3& dir : directions) {
    int crossings = 0;
    bool unstable = false;
    for (const auto& tri : mesh.triangles) {
      switch (ray_triangle(p, dir, mesh.vertices[tri[0]],
                           mesh.vertices[tri[1]], mesh.vertices[tri[2]])) {
        case RayHit::hit:
          ++crossings;
          break;
        case RayHit::unstable:
          unstable = true;
          break;
        case RayHit::miss:
          break;
      }
      if (unstable) break;
    }
    parity = (crossings % 2) == 1;
    if (!unstable) return parity;
  }
  return parity;  // every direction grazed an edge; accept the last count
}

SurfaceSampler::SurfaceSampler(const TriMesh& mesh, bool region_only,
                               uint64_t seed)
    : mesh_(mesh), rng_(seed) {
  double running = 0.0;
  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    if (region_only && !mesh.triangle_in_region(t)) continue;
    const auto& tri = mesh.triangles[static_cast<size_t>(t)];
    const double area = triangle_area(mesh.vertices[tri[0]],
                                      mesh.vertices[tri[1]],
                                      mesh.vertices[tri[2]]);
    if (area <= 0.0) continue;
    running += area;
    tri_index_.push_back(t);
    cum_area_.push_back(running);
  }
  if (tri_index_.empty())
    fail(Errc::empty_region, "sample_surface: region selects no triangle");
}

Point3 SurfaceSampler::next() {
  const double r = rng_.next_double() * cum_area_.back();
  const size_t pick = static_cast<size_t>(
      std::upper_bound(cum_area_.begin(), cum_area_.end(), r) -
      cum_area_.begin());
  const size_t idx = std::min(pick, cum_area_.size() - 1);
  last_triangle_ = tri_index_[idx];
  const auto& tri = mesh_.triangles[static_cast<size_t>(last_triangle_)];
  // Uniform barycentric point via the sqrt trick.
  const double r1 = std::sqrt(rng_.next_double());
  const double r2 = rng_.next_double();
  const double a = 1.0 - r1;
  const double b = r1 * (1.0 - r2);
  const double c = r1 * r2;
  return mesh_.vertices[tri[0]] * a + mesh_.vertices[tri[1]] * b +
         mesh_.vertices[tri[2]] * c;
}

std::vector<Point3> sample_surface(const TriMesh& mesh, int count,
                                   bool region_only, uint64_t seed) {
  SurfaceSampler sampler(mesh, region_only, seed);
  std::vector<Point3> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(sampler.next());
  return out;
}

}  // namespace fibrow
