#pragma once

#include <vector>

#include "fibrow/geometry.hpp"

namespace fibrow {

// One eyebrow hair as an ordered 3D polyline, index 0 = root.
struct Fiber {
  std::vector<Point3> points;

  int size() const { return static_cast<int>(points.size()); }
  const Point3& root() const { return points.front(); }
  const Point3& tip() const { return points.back(); }
};

// A whole eyebrow: the fibers plus the step they were grown with.
struct FiberSet {
  std::vector<Fiber> fibers;
  double step = 0.014;

  int size() const { return static_cast<int>(fibers.size()); }
  bool empty() const { return fibers.empty(); }
};

struct RootSet {
  std::vector<Point3> roots;

  int size() const { return static_cast<int>(roots.size()); }
  bool empty() const { return roots.empty(); }
};

// Sum of consecutive segment lengths; 0 for a single point.
double arc_length(const Fiber& f);

// Redistribute to n points at equal arc-length spacing along the polyline.
// Endpoints are preserved exactly. Throws too_short for fibers of < 2 points.
Fiber resample_fiber(const Fiber& f, int n);

Box3 bounds(const Fiber& f);
Box3 bounds(const FiberSet& fs);

}  // namespace fibrow
