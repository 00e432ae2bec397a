#include "fibrow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fibrow/errors.hpp"

namespace fibrow {

int den(const Point3& r, const RootSet& cloud, double phi, bool include_self) {
  if (phi <= 0.0) fail(Errc::config_invalid, "den: phi must be > 0");
  const double phi2 = phi * phi;
  int count = 0;
  for (const auto& q : cloud.roots) {
    if (!include_self && q == r) continue;
    if (distance2(q, r) <= phi2) ++count;
  }
  return count;
}

namespace {

// Index of the nearest point in cloud; ties to the lowest index.
size_t nearest_index(const Point3& p, const std::vector<Point3>& cloud) {
  double best = std::numeric_limits<double>::max();
  size_t best_i = 0;
  for (size_t i = 0; i < cloud.size(); ++i) {
    const double d = distance2(cloud[i], p);
    if (d < best) {
      best = d;
      best_i = i;
    }
  }
  return best_i;
}

double nde_directed(const RootSet& from, const RootSet& to, double phi) {
  double sum = 0.0;
  for (const auto& x : from.roots) {
    const Point3& x_star = to.roots[nearest_index(x, to.roots)];
    sum += std::abs(static_cast<double>(den(x, from, phi)) -
                    den(x_star, to, phi));
  }
  return sum / static_cast<double>(from.size());
}

double dcd_directed(const RootSet& from, const RootSet& to, double phi) {
  double sum = 0.0;
  for (const auto& x : from.roots) {
    const Point3& x_star = to.roots[nearest_index(x, to.roots)];
    const double dden = static_cast<double>(den(x, from, phi)) -
                        den(x_star, to, phi);
    sum += std::abs(dden + 1.0) * distance(x, x_star);
  }
  return sum / static_cast<double>(from.size());
}

}  // namespace

double nde(const RootSet& pred, const RootSet& gt, double phi) {
  if (pred.empty() || gt.empty())
    fail(Errc::empty_set, "nde: empty root set");
  return 0.5 * (nde_directed(pred, gt, phi) + nde_directed(gt, pred, phi));
}

double dcd(const RootSet& pred, const RootSet& gt, double phi) {
  if (pred.empty() || gt.empty())
    fail(Errc::empty_set, "dcd: empty root set");
  return 0.5 * (dcd_directed(pred, gt, phi) + dcd_directed(gt, pred, phi));
}

double mle(const std::vector<std::vector<int>>& pred_levels,
           const std::vector<std::vector<int>>& gt_levels, double step) {
  if (step <= 0.0) fail(Errc::config_invalid, "mle: step must be > 0");
  if (pred_levels.size() != gt_levels.size())
    fail(Errc::shape_mismatch, "mle: eyebrow count mismatch");
  double sum = 0.0;
  long total = 0;
  for (size_t i = 0; i < pred_levels.size(); ++i) {
    if (pred_levels[i].size() != gt_levels[i].size())
      fail(Errc::shape_mismatch, "mle: fiber count mismatch in eyebrow " +
                                     std::to_string(i));
    for (size_t j = 0; j < pred_levels[i].size(); ++j)
      sum += step * std::abs(pred_levels[i][j] - gt_levels[i][j]);
    total += static_cast<long>(pred_levels[i].size());
  }
  if (total == 0) fail(Errc::empty_set, "mle: no fibers");
  return sum / static_cast<double>(total);
}

std::vector<UnitVec3> fiber_directions(const Fiber& f, int n) {
  if (n < 2) fail(Errc::config_invalid, "fiber_directions: n must be >= 2");
  if (f.size() < 2)
    fail(Errc::too_short, "fiber_directions: fiber has fewer than 2 points");
  const Fiber rs = resample_fiber(f, n);
  std::vector<UnitVec3> dirs(static_cast<size_t>(n));
  for (int i = 0; i < n - 1; ++i)
    dirs[static_cast<size_t>(i)] = normalized_or(
        rs.points[static_cast<size_t>(i) + 1] - rs.points[static_cast<size_t>(i)],
        i > 0 ? dirs[static_cast<size_t>(i) - 1] : Vec3{1, 0, 0});
  dirs[static_cast<size_t>(n) - 1] = dirs[static_cast<size_t>(n) - 2];
  return dirs;
}

namespace {

double fdo_directed(const FiberSet& from, const FiberSet& to, int n) {
  // Root positions of the target set, matched by nearest root.
  std::vector<Point3> to_roots;
  to_roots.reserve(to.fibers.size());
  for (const auto& f : to.fibers) to_roots.push_back(f.root());

  std::vector<std::vector<UnitVec3>> to_dirs(to.fibers.size());
  double sum = 0.0;
  for (const auto& f : from.fibers) {
    const size_t match = nearest_index(f.root(), to_roots);
    if (to_dirs[match].empty())
      to_dirs[match] = fiber_directions(to.fibers[match], n);
    const auto dirs = fiber_directions(f, n);
    for (int i = 0; i < n; ++i)
      sum += distance(dirs[static_cast<size_t>(i)],
                      to_dirs[match][static_cast<size_t>(i)]);
  }
  return sum / static_cast<double>(from.size());
}

}  // namespace

double fdo(const FiberSet& pred, const FiberSet& gt, int n) {
  if (pred.empty() || gt.empty())
    fail(Errc::empty_set, "fdo: empty fiber set");
  return 0.5 * (fdo_directed(pred, gt, n) + fdo_directed(gt, pred, n));
}

size_t VoxelVolume::count() const {
  size_t c = 0;
  for (uint8_t v : occ) c += v != 0;
  return c;
}

namespace {

double point_segment_distance2(const Point3& p, const Point3& a,
                               const Point3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.norm2();
  if (len2 == 0.0) return distance2(p, a);
  double t = dot(p - a, ab) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return distance2(p, a + ab * t);
}

}  // namespace

VoxelVolume fibers_to_mesh(const FiberSet& fs, double radius,
                           double grid_res) {
  if (fs.empty()) fail(Errc::empty_set, "fibers_to_mesh: empty fiber set");
  if (radius <= 0.0 || grid_res <= 0.0)
    fail(Errc::config_invalid, "fibers_to_mesh: radius and grid_res must be > 0");

  const double voxel = 1.0 / grid_res;
  Box3 box = bounds(fs);
  box = box.expanded(radius);

  VoxelVolume vol;
  vol.voxel = voxel;
  vol.ix0 = static_cast<long>(std::floor(box.min.x / voxel));
  vol.iy0 = static_cast<long>(std::floor(box.min.y / voxel));
  vol.iz0 = static_cast<long>(std::floor(box.min.z / voxel));
  vol.nx = static_cast<int>(std::floor(box.max.x / voxel)) - vol.ix0 + 1;
  vol.ny = static_cast<int>(std::floor(box.max.y / voxel)) - vol.iy0 + 1;
  vol.nz = static_cast<int>(std::floor(box.max.z / voxel)) - vol.iz0 + 1;
  vol.occ.assign(static_cast<size_t>(vol.nx) * vol.ny * vol.nz, 0);

  const double r2 = radius * radius;
  // Stamp each segment over its dilated bounding box; cell centers within
  // the capsule radius become occupied.
  const auto stamp = [&](const Point3& a, const Point3& b) {
    Box3 seg_box;
    seg_box.grow(a);
    seg_box.grow(b);
    seg_box = seg_box.expanded(radius);
    const long sx0 = std::max(vol.ix0,
                              static_cast<long>(std::floor(seg_box.min.x / voxel)));
    const long sy0 = std::max(vol.iy0,
                              static_cast<long>(std::floor(seg_box.min.y / voxel)));
    const long sz0 = std::max(vol.iz0,
                              static_cast<long>(std::floor(seg_box.min.z / voxel)));
    const long sx1 = std::min(vol.ix0 + vol.nx - 1,
                              static_cast<long>(std::floor(seg_box.max.x / voxel)));
    const long sy1 = std::min(vol.iy0 + vol.ny - 1,
                              static_cast<long>(std::floor(seg_box.max.y / voxel)));
    const long sz1 = std::min(vol.iz0 + vol.nz - 1,
                              static_cast<long>(std::floor(seg_box.max.z / voxel)));
    for (long kz = sz0; kz <= sz1; ++kz)
      for (long ky = sy0; ky <= sy1; ++ky)
        for (long kx = sx0; kx <= sx1; ++kx) {
          const Point3 center{(kx + 0.5) * voxel, (ky + 0.5) * voxel,
                              (kz + 0.5) * voxel};
          if (point_segment_distance2(center, a, b) <= r2) {
            const size_t idx =
                (static_cast<size_t>(kz - vol.iz0) * vol.ny +
                 static_cast<size_t>(ky - vol.iy0)) * vol.nx +
                static_cast<size_t>(kx - vol.ix0);
            vol.occ[idx] = 1;
          }
        }
  };

  for (const auto& f : fs.fibers) {
    if (f.points.empty()) continue;
    if (f.size() == 1) {
      stamp(f.points[0], f.points[0]);
      continue;
    }
    for (size_t i = 1; i < f.points.size(); ++i)
      stamp(f.points[i - 1], f.points[i]);
  }
  return vol;
}

double iou(const VoxelVolume& a, const VoxelVolume& b) {
  if (a.voxel != b.voxel)
    fail(Errc::dimension_mismatch, "iou: voxel sizes differ");
  if (a.count() == 0 && b.count() == 0)
    fail(Errc::both_empty, "iou: both volumes empty");

  const auto occupied = [](const VoxelVolume& v, long x, long y, long z) {
    const long i = x - v.ix0, j = y - v.iy0, k = z - v.iz0;
    if (i < 0 || j < 0 || k < 0 || i >= v.nx || j >= v.ny || k >= v.nz)
      return false;
    return v.at(static_cast<int>(i), static_cast<int>(j), static_cast<int>(k));
  };

  const long x0 = std::min(a.ix0, b.ix0);
  const long y0 = std::min(a.iy0, b.iy0);
  const long z0 = std::min(a.iz0, b.iz0);
  const long x1 = std::max(a.ix0 + a.nx, b.ix0 + b.nx);
  const long y1 = std::max(a.iy0 + a.ny, b.iy0 + b.ny);
  const long z1 = std::max(a.iz0 + a.nz, b.iz0 + b.nz);

  size_t inter = 0, uni = 0;
  for (long z = z0; z < z1; ++z)
    for (long y = y0; y < y1; ++y)
      for (long x = x0; x < x1; ++x) {
        const bool in_a = occupied(a, x, y, z);
        const bool in_b = occupied(b, x, y, z);
        inter += in_a && in_b;
        uni += in_a || in_b;
      }
  return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<std::vector<int>> levels_from_fibers(
    const std::vector<FiberSet>& eyebrows, double step) {
  if (step <= 0.0)
    fail(Errc::config_invalid, "levels_from_fibers: step must be > 0");
  std::vector<std::vector<int>> out;
  out.reserve(eyebrows.size());
  for (const auto& fs : eyebrows) {
    std::vector<int> levels;
    levels.reserve(fs.fibers.size());
    for (const auto& f : fs.fibers)
      levels.push_back(static_cast<int>(std::lround(arc_length(f) / step)));
    out.push_back(std::move(levels));
  }
  return out;
}

namespace {

// Directed nearest-root MLE for fiber sets of different sizes.
double mle_directed(const FiberSet& from, const FiberSet& to, double step) {
  std::vector<Point3> to_roots;
  to_roots.reserve(to.fibers.size());
  for (const auto& f : to.fibers) to_roots.push_back(f.root());
  double sum = 0.0;
  for (const auto& f : from.fibers) {
    const size_t match = nearest_index(f.root(), to_roots);
    const long lf = std::lround(arc_length(f) / step);
    const long lt = std::lround(arc_length(to.fibers[match]) / step);
    sum += step * static_cast<double>(std::abs(lf - lt));
  }
  return sum / static_cast<double>(from.size());
}

}  // namespace

MetricsReport evaluate(const FiberSet& pred, const FiberSet& gt,
                       const EvalParams& params) {
  if (pred.empty() || gt.empty())
    fail(Errc::empty_set, "evaluate: empty fiber set");

  RootSet pred_roots, gt_roots;
  for (const auto& f : pred.fibers) pred_roots.roots.push_back(f.root());
  for (const auto& f : gt.fibers) gt_roots.roots.push_back(f.root());

  MetricsReport report;
  report.params = params;
  report.phis = params.phis;
  for (double phi : params.phis) {
    report.nde_values.push_back(nde(pred_roots, gt_roots, phi));
    report.dcd_values.push_back(dcd(pred_roots, gt_roots, phi));
  }

  if (pred.size() == gt.size()) {
    report.mle_value = mle(levels_from_fibers({pred}, params.step),
                           levels_from_fibers({gt}, params.step), params.step);
    report.mle_pairing = "index";
  } else {
    report.mle_value = 0.5 * (mle_directed(pred, gt, params.step) +
                              mle_directed(gt, pred, params.step));
    report.mle_pairing = "nearest_root";
  }

  report.fdo_value = fdo(pred, gt, params.fdo_n);
  report.iou_value = iou(fibers_to_mesh(pred, params.radius, params.grid_res),
                         fibers_to_mesh(gt, params.radius, params.grid_res));
  return report;
}

}  // namespace fibrow
