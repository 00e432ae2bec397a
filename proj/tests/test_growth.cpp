#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "fibrow/errors.hpp"
#include "fibrow/growth.hpp"
#include "fibrow/rng.hpp"
#include "test_util.hpp"

using namespace fibrow;

namespace {

// Distance from a point to the circle of radius `radius` around the axis
// line through `center`, lying in the plane at axial offset `axial0`.
double distance_to_circle(const Point3& p, const Vec3& center,
                          const Vec3& axis, double radius, double axial0) {
  const Vec3 rel = p - center;
  const double axial = dot(rel, axis);
  const Vec3 radial = rel - axis * axial;
  const double dr = radial.norm() - radius;
  return std::sqrt(dr * dr + (axial - axial0) * (axial - axial0));
}

// Two-sided Hausdorff distance between a polyline and an arc swept from the
// fiber root around `axis` by `sweep` radians, sampled densely.
double hausdorff_to_arc(const Fiber& f, const Vec3& center, const Vec3& axis,
                        double sweep) {
  const Vec3 rel = f.root() - center;
  const double axial = dot(rel, axis);
  const Vec3 e1 = rel - axis * axial;
  const double radius = e1.norm();
  const Vec3 u = e1 * (1.0 / radius);
  const Vec3 v = cross(axis, u);

  const int arc_samples = 2000;
  std::vector<Point3> arc;
  arc.reserve(arc_samples + 1);
  for (int i = 0; i <= arc_samples; ++i) {
    const double t = sweep * i / arc_samples;
    arc.push_back(center + axis * axial +
                  (u * std::cos(t) + v * std::sin(t)) * radius);
  }

  const auto point_to_polyline = [](const Point3& p,
                                    const std::vector<Point3>& poly) {
    double best = 1e300;
    for (size_t i = 1; i < poly.size(); ++i) {
      const Vec3 ab = poly[i] - poly[i - 1];
      const double len2 = ab.norm2();
      double t = len2 > 0 ? dot(p - poly[i - 1], ab) / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      best = std::min(best, distance(p, poly[i - 1] + ab * t));
    }
    return best;
  };

  double forward = 0.0;
  for (const auto& p : f.points) forward = std::max(forward, point_to_polyline(p, arc));
  double backward = 0.0;
  for (const auto& p : arc)
    backward = std::max(backward, point_to_polyline(p, f.points));
  return std::max(forward, backward);
}

}  // namespace

TEST_CASE("smooth_direction: below-threshold directions pass through") {
  const UnitVec3 prev{1, 0, 0};
  CHECK(smooth_direction(prev, prev, 30.0) == prev);

  SplitMix64 rng(2);
  const UnitVec3 at20 = testutil::unit_at_angle(prev, deg_to_rad(20.0), rng);
  const UnitVec3 out = smooth_direction(prev, at20, 30.0);
  CHECK(out == at20);
}

TEST_CASE("smooth_direction: above threshold returns the bisector") {
  const UnitVec3 prev{1, 0, 0};
  const UnitVec3 cur{std::sqrt(0.5), std::sqrt(0.5), 0.0};
  const UnitVec3 out = smooth_direction(prev, cur, 30.0);
  CHECK(out.x == doctest::Approx(0.92388).epsilon(1e-4));
  CHECK(out.y == doctest::Approx(0.38268).epsilon(1e-4));
  CHECK(out.z == doctest::Approx(0.0));
  // Exactly the half-angle bisector.
  CHECK(angle_between(prev, out) == doctest::Approx(deg_to_rad(22.5)).epsilon(1e-9));
}

TEST_CASE("smooth_direction: antiparallel guard returns prev") {
  const UnitVec3 prev{0, 0, 1};
  const UnitVec3 cur{0, 1e-9, -1};
  CHECK(smooth_direction(prev, normalized(cur), 30.0) == prev);
}

TEST_CASE("smooth_direction: bisector property on random pairs") {
  SplitMix64 rng(6);
  for (int trial = 0; trial < 10000; ++trial) {
    const UnitVec3 a = testutil::random_unit(rng);
    const UnitVec3 b = testutil::random_unit(rng);
    const double mutual = angle_between(a, b);
    if (mutual >= deg_to_rad(179.9)) continue;
    const UnitVec3 out = smooth_direction(a, b, 30.0);
    CHECK(std::abs(out.norm() - 1.0) <= 1e-9);
    CHECK(angle_between(out, a) <= mutual + 1e-9);
    CHECK(angle_between(out, b) <= mutual + 1e-9);
  }
}

TEST_CASE("grow_fiber: constant field with max-steps ender is affine") {
  const ConstantField field({1, 0, 0});
  const MaxStepsEnder ender(5);
  const Fiber f = grow_fiber({0, 0, 0}, field, ender, {});
  REQUIRE(f.size() == 6);
  for (int j = 0; j < 6; ++j) {
    CHECK(f.points[static_cast<size_t>(j)].x ==
          doctest::Approx(0.014 * j).epsilon(1e-12));
    CHECK(f.points[static_cast<size_t>(j)].y == 0.0);
  }
}

TEST_CASE("grow_fiber: immediate stop returns the root alone") {
  const ConstantField field({0, 1, 0});
  const LengthTableEnder ender(std::vector<int>{0});
  const Fiber f = grow_fiber({0.5, 0.5, 0.5}, field, ender, {});
  REQUIRE(f.size() == 1);
  CHECK(f.points[0] == Point3{0.5, 0.5, 0.5});
}

TEST_CASE("grow_fiber: arc field stays within 2 steps of the analytic arc") {
  const Vec3 center{0, 0, 0};
  const Vec3 axis{0, 0, 1};
  const ArcField field(center, axis);
  const MaxStepsEnder ender(50);
  GrowthConfig cfg;
  const Point3 root{0.5, 0.0, 0.1};
  const Fiber f = grow_fiber(root, field, ender, cfg);
  REQUIRE(f.size() == 51);
  // Every grown point stays near the root's circle (which lies at z = 0.1).
  for (const auto& p : f.points)
    CHECK(distance_to_circle(p, center, axis, 0.5, 0.1) <= 2.0 * cfg.step);
  // Two-sided Hausdorff against the arc subtended by 50 chords of s/r.
  const double sweep = 50 * 2.0 * std::asin(cfg.step / (2.0 * 0.5));
  CHECK(hausdorff_to_arc(f, center, axis, sweep) <= 2.0 * cfg.step);
}

TEST_CASE("grow_fiber: root outside the field domain throws") {
  std::vector<float> data(8 * 3, 1.0f);
  const VoxelGridField field(2, 2, 2, {0, 0, 0}, {1, 1, 1}, data);
  const MaxStepsEnder ender(5);
  CHECK_THROWS_AS(grow_fiber({5, 5, 5}, field, ender, {}), Error);
}

TEST_CASE("grow_fiber: leaving the field volume stops gracefully") {
  // Constant +x field over a unit box: growth must stop at the x boundary.
  std::vector<float> data(8 * 3, 0.0f);
  for (size_t i = 0; i < 8; ++i) data[3 * i] = 1.0f;
  const VoxelGridField field(2, 2, 2, {0, 0, 0}, {1, 1, 1}, data);
  const MaxStepsEnder ender(1000);
  GrowthConfig cfg;
  cfg.max_steps = 1000;
  const Fiber f = grow_fiber({0.5, 0.5, 0.5}, field, ender, cfg);
  CHECK(f.size() > 30);
  CHECK(f.size() < 40);  // 0.5 / 0.014 = 35.7 steps to the boundary
  CHECK(f.tip().x <= 1.0 + cfg.step);
}

TEST_CASE("mean_length_ender: stops after six segments at the mean length") {
  const ConstantField field({0, 0, 1});
  const MeanLengthEnder ender(0.0714);
  const Fiber f = grow_fiber({0, 0, 0}, field, ender, {});
  // Five segments reach 0.070 < 0.0714; six reach 0.084 >= 0.0714.
  CHECK(f.size() == 7);
  CHECK(arc_length(f) == doctest::Approx(0.084).epsilon(1e-9));
}

TEST_CASE("mean_length_ender: target below one step stops after one step") {
  const ConstantField field({1, 0, 0});
  const MeanLengthEnder ender(0.001);
  const Fiber f = grow_fiber({0, 0, 0}, field, ender, {});
  CHECK(f.size() == 2);
}

TEST_CASE("mean_length_ender: single-point prefix continues") {
  const MeanLengthEnder ender(0.5);
  CHECK(!ender.should_stop(Fiber{{{0, 0, 0}}}, 0));
}

TEST_CASE("mesh_cut_ender: containment decisions") {
  const TriMesh cube = testutil::make_cube();
  const MeshCutEnder ender(cube);
  CHECK(!ender.should_stop(Fiber{{{0, 0, 0}}}, 0));
  CHECK(ender.should_stop(Fiber{{{0, 0, 0}, {10, 10, 10}}}, 0));
}

TEST_CASE("mesh_cut_ender: open mesh is rejected") {
  TriMesh patch;
  patch.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  patch.triangles = {{0, 1, 2}};
  CHECK_THROWS_AS(MeshCutEnder{patch}, Error);
}

TEST_CASE("mesh_cut_ender: growth leaves exactly one point outside") {
  const TriMesh cube = testutil::make_cube({0, 0, 0}, 0.2);
  const ConstantField field({1, 0, 0});
  const MeshCutEnder ender(cube);
  GrowthConfig cfg;
  const Fiber f = grow_fiber({-0.15, 0.05, 0.0}, field, ender, cfg);
  REQUIRE(f.size() >= 2);
  for (int i = 0; i + 1 < f.size(); ++i)
    CHECK(point_in_mesh(cube, f.points[static_cast<size_t>(i)]));
  CHECK(!point_in_mesh(cube, f.tip()));
  // STOP/CONTINUE flips exactly at the face crossing.
  CHECK(f.points[f.points.size() - 2].x < 0.2);
  CHECK(f.tip().x > 0.2);
}

TEST_CASE("length_table_ender: exact point counts") {
  const ConstantField field({0, 1, 0});
  const std::vector<int> table = {0, 5, 2, 9};
  const LengthTableEnder ender(table);
  for (int r = 0; r < 4; ++r) {
    const Fiber f = grow_fiber({0, 0, 0}, field, ender, {}, r);
    CHECK(f.size() == table[static_cast<size_t>(r)] + 1);
  }
}

TEST_CASE("length_table_ender: missing root index") {
  const LengthTableEnder ender(std::vector<int>{3});
  CHECK_THROWS_AS(ender.should_stop(Fiber{{{0, 0, 0}}}, 1), Error);
  try {
    ender.should_stop(Fiber{{{0, 0, 0}}}, 1);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::missing_root);
  }
}

TEST_CASE("grow_all: one straight fiber per root, root order kept") {
  const ConstantField field({0, 0, 1});
  const MaxStepsEnder ender(4);
  RootSet roots;
  for (int i = 0; i < 8; ++i)
    roots.roots.push_back({static_cast<double>(i), 0.0, 0.0});
  const GrowReport report = grow_all(roots, field, ender, {});
  REQUIRE(report.fibers.size() == 8);
  CHECK(report.failures.empty());
  for (int i = 0; i < 8; ++i) {
    const Fiber& f = report.fibers.fibers[static_cast<size_t>(i)];
    CHECK(f.root().x == static_cast<double>(i));
    CHECK(f.size() == 5);
  }
}

TEST_CASE("grow_all: empty roots throw") {
  const ConstantField field({1, 0, 0});
  const MaxStepsEnder ender(4);
  CHECK_THROWS_AS(grow_all(RootSet{}, field, ender, {}), Error);
}

TEST_CASE("grow_all: parallel equals sequential bit-exactly") {
  SplitMix64 rng(10);
  const ArcField field({0, 0, 0}, {0, 0, 1});
  const MeanLengthEnder ender(0.0714);
  RootSet roots;
  for (int i = 0; i < 64; ++i) {
    const double ang = rng.next_range(0, 2 * kPi);
    roots.roots.push_back({0.4 * std::cos(ang), 0.4 * std::sin(ang),
                           rng.next_range(-0.2, 0.2)});
  }
  const GrowReport seq = grow_all(roots, field, ender, {}, 1);
  for (int threads : {2, 4, 7}) {
    const GrowReport par = grow_all(roots, field, ender, {}, threads);
    REQUIRE(par.fibers.size() == seq.fibers.size());
    for (int i = 0; i < seq.fibers.size(); ++i) {
      const auto& a = seq.fibers.fibers[static_cast<size_t>(i)].points;
      const auto& b = par.fibers.fibers[static_cast<size_t>(i)].points;
      REQUIRE(a.size() == b.size());
      for (size_t j = 0; j < a.size(); ++j) CHECK(a[j] == b[j]);
    }
  }
}

TEST_CASE("grow_all: partial failures are collected, survivors grow") {
  std::vector<float> data(8 * 3, 1.0f);
  const VoxelGridField field(2, 2, 2, {0, 0, 0}, {1, 1, 1}, data);
  const MaxStepsEnder ender(2);
  RootSet roots;
  roots.roots = {{0.5, 0.5, 0.5}, {5, 5, 5}, {0.2, 0.2, 0.2}};
  const GrowReport report = grow_all(roots, field, ender, {});
  CHECK(report.fibers.size() == 2);
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0].root_index == 1);
}

TEST_CASE("grow_all: all roots failing throws") {
  std::vector<float> data(8 * 3, 1.0f);
  const VoxelGridField field(2, 2, 2, {0, 0, 0}, {1, 1, 1}, data);
  const MaxStepsEnder ender(2);
  RootSet roots;
  roots.roots = {{5, 5, 5}, {6, 6, 6}};
  CHECK_THROWS_AS(grow_all(roots, field, ender, {}), Error);
}

TEST_CASE("growth invariants: spacing s and point count cap") {
  SplitMix64 rng(12);
  const ArcField field({0, 0, 0}, {0, 1, 0}, 0.3);
  GrowthConfig cfg;
  cfg.max_steps = 25;
  const MeanLengthEnder ender(10.0);  // never stops before the cap
  for (int trial = 0; trial < 100; ++trial) {
    const double ang = rng.next_range(0, 2 * kPi);
    const Point3 root{0.6 * std::cos(ang), rng.next_range(-1, 1),
                      0.6 * std::sin(ang)};
    const Fiber f = grow_fiber(root, field, ender, cfg);
    CHECK(f.size() <= cfg.max_steps + 1);
    for (size_t j = 1; j < f.points.size(); ++j)
      CHECK(std::abs(distance(f.points[j - 1], f.points[j]) - cfg.step) <=
            1e-9);
  }
}
