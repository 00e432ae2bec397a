#include "fibrow/fiber.hpp"

#include "fibrow/errors.hpp"

namespace fibrow {

double arc_length(const Fiber& f) {
  double total = 0.0;
  for (size_t i = 1; i < f.points.size(); ++i)
    total += distance(f.points[i - 1], f.points[i]);
  return total;
}

Fiber resample_fiber(const Fiber& f, int n) {
  if (f.size() < 2)
    fail(Errc::too_short, "resample_fiber: fiber has fewer than 2 points");
  if (n < 2) fail(Errc::config_invalid, "resample_fiber: n must be >= 2");

  // Cumulative arc length per input vertex.
  std::vector<double> cum(f.points.size(), 0.0);
  for (size_t i = 1; i < f.points.size(); ++i)
    cum[i] = cum[i - 1] + distance(f.points[i - 1], f.points[i]);
  const double total = cum.back();

  Fiber out;
  out.points.reserve(static_cast<size_t>(n));
  out.points.push_back(f.points.front());
  size_t seg = 1;
  for (int i = 1; i < n - 1; ++i) {
    double target = total * static_cast<double>(i) / (n - 1);
    while (seg + 1 < cum.size() && cum[seg] < target) ++seg;
    double seg_len = cum[seg] - cum[seg - 1];
    double t = seg_len > 0.0 ? (target - cum[seg - 1]) / seg_len : 0.0;
    const Point3& a = f.points[seg - 1];
    const Point3& b = f.points[seg];
    out.points.push_back(a + (b - a) * t);
  }
  out.points.push_back(f.points.back());
  return out;
}

Box3 bounds(const Fiber& f) {
  Box3 box;
  for (const auto& p : f.points) box.grow(p);
  return box;
}

Box3 bounds(const FiberSet& fs) {
  Box3 box;
  for (const auto& f : fs.fibers)
    for (const auto& p : f.points) box.grow(p);
  return box;
}

}  // namespace fibrow
