#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fibrow/fiber.hpp"

namespace fibrow {

// Number of neighbors of r within radius phi. When r is itself a member of
// the cloud it is excluded; with include_self every point within phi counts.
int den(const Point3& r, const RootSet& cloud, double phi,
        bool include_self = false);

// Nearest density error: for each point the absolute difference between its
// density in its own cloud and the density of its nearest counterpart in the
// other cloud, averaged; symmetrized by the arithmetic mean of the two
// directions.
double nde(const RootSet& pred, const RootSet& gt, double phi);

// Density-aware chamfer distance: |den(x, pred) - den(x*, gt) + 1| weighted
// nearest-neighbor distances, averaged and symmetrized like nde.
double dcd(const RootSet& pred, const RootSet& gt, double phi);

// Mean length error over per-fiber length levels (units of the growing
// step): sum of step * |level - level*| divided by the total fiber count.
// Outer index: eyebrow; inner: fiber. Shapes must match.
double mle(const std::vector<std::vector<int>>& pred_levels,
           const std::vector<std::vector<int>>& gt_levels, double step);

// Resample to n points and return n unit growing directions: forward
// differences, with the last direction duplicating the previous one.
std::vector<UnitVec3> fiber_directions(const Fiber& f, int n);

// Fiber-level L2 distance of 3D orientation. Each fiber is matched to the
// fiber with the nearest root in the other set (ties to the lowest index);
// the inner sum over the n per-point direction differences is kept literal,
// so the magnitude scales with n. Symmetrized by the arithmetic mean.
double fdo(const FiberSet& pred, const FiberSet& gt, int n = 20);

// Occupancy grid over a union of capsules, on a global lattice of cells of
// size 1/grid_res (origin snapped to multiples of the cell size so separate
// volumes align).
struct VoxelVolume {
  int nx = 0, ny = 0, nz = 0;
  long ix0 = 0, iy0 = 0, iz0 = 0;  // lattice index of the first cell
  double voxel = 0.0;
  std::vector<uint8_t> occ;  // x-fastest

  bool at(int i, int j, int k) const {
    return occ[(static_cast<size_t>(k) * ny + j) * nx + i] != 0;
  }
  size_t count() const;
};

// Voxelize the union of capsules of the given radius around every fiber
// segment (single-point fibers become spheres).
VoxelVolume fibers_to_mesh(const FiberSet& fs, double radius, double grid_res);

// |A intersect B| / |A union B| over the joint bounds. Both volumes must
// share the voxel size; two empty volumes are an error.
double iou(const VoxelVolume& a, const VoxelVolume& b);

// Quantize each fiber of each eyebrow to length levels: round(arc / step).
std::vector<std::vector<int>> levels_from_fibers(
    const std::vector<FiberSet>& eyebrows, double step);

struct EvalParams {
  std::vector<double> phis = {0.04, 0.02, 0.01};
  int fdo_n = 20;
  double radius = 0.004;
  double grid_res = 256.0;
  double step = 0.014;
};

struct MetricsReport {
  std::vector<double> phis;
  std::vector<double> nde_values;
  std::vector<double> dcd_values;
  double mle_value = 0.0;
  double fdo_value = 0.0;
  double iou_value = 0.0;
  EvalParams params;
  // index: fibers paired positionally (equal counts); nearest_root otherwise.
  std::string mle_pairing;
};

// Full metric suite between two fiber sets. Roots are the fibers' first
// points. MLE pairs fibers by index when the counts match and by nearest
// root otherwise (each direction averaged, like the other metrics).
MetricsReport evaluate(const FiberSet& pred, const FiberSet& gt,
                       const EvalParams& params = {});

}  // namespace fibrow
