#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "fibrow/camera.hpp"
#include "fibrow/errors.hpp"
#include "fibrow/fiber.hpp"
#include "fibrow/field.hpp"
#include "fibrow/geometry.hpp"
#include "fibrow/mesh.hpp"
#include "test_util.hpp"

using namespace fibrow;

namespace {

Camera ortho_identity(int w, int h, double scale = 1.0) {
  Camera cam;
  cam.mode = CameraMode::orthographic;
  cam.fx = cam.fy = scale;
  cam.cx = w / 2.0;
  cam.cy = h / 2.0;
  cam.width = w;
  cam.height = h;
  return cam;
}

}  // namespace

TEST_CASE("project: orthographic identity maps origin to principal point") {
  const Camera cam = ortho_identity(640, 480);
  const Vec2 uv = project(cam, {0, 0, 0});
  CHECK(uv.x == doctest::Approx(320.0));
  CHECK(uv.y == doctest::Approx(240.0));
}

TEST_CASE("project: orthographic scale is affine") {
  const Camera cam = ortho_identity(640, 480, 100.0);
  const Vec2 uv = project(cam, {0.1, 0.0, 0.0});
  CHECK(uv.x == doctest::Approx(320.0 + 10.0).epsilon(1e-12));
  CHECK(uv.y == doctest::Approx(240.0).epsilon(1e-12));
}

TEST_CASE("project: perspective pinhole formula") {
  // Hand pinhole: u = f*x/z + cx = 500*0.2/2 + 320 = 370, v = 500*0.1/2 + 240.
  Camera cam;
  cam.mode = CameraMode::perspective;
  cam.fx = cam.fy = 500.0;
  cam.cx = 320.0;
  cam.cy = 240.0;
  cam.width = 640;
  cam.height = 480;
  const Vec2 uv = project(cam, {0.2, 0.1, 2.0});
  CHECK(uv.x == doctest::Approx(320.0 + 50.0).epsilon(1e-12));
  CHECK(uv.y == doctest::Approx(240.0 + 25.0).epsilon(1e-12));
}

TEST_CASE("project: degenerate perspective depth throws") {
  Camera cam;
  cam.mode = CameraMode::perspective;
  cam.fx = cam.fy = 500.0;
  CHECK_THROWS_AS(project(cam, {0.1, 0.1, 0.0}), Error);
  try {
    project(cam, {0.1, 0.1, 1e-12});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::degenerate_projection);
  }
}

TEST_CASE("look_at: camera on +z sees target at the optical axis") {
  Camera cam = look_at(CameraMode::perspective, {0, 0, 4}, {0, 0, 0});
  cam.fx = cam.fy = 100.0;
  cam.cx = 50.0;
  cam.cy = 50.0;
  const Vec2 uv = project(cam, {0, 0, 0});
  CHECK(uv.x == doctest::Approx(50.0).epsilon(1e-12));
  CHECK(uv.y == doctest::Approx(50.0).epsilon(1e-12));
  // The target is 4 units in front.
  CHECK(cam.to_camera({0, 0, 0}).z == doctest::Approx(4.0));
  CHECK(cam.center().z == doctest::Approx(4.0));
}

TEST_CASE("positional_encoding: zero point") {
  const auto enc = positional_encoding({0, 0, 0}, 3);
  REQUIRE(enc.size() == 3 + 6 * 3);
  for (int i = 0; i < 3; ++i) CHECK(enc[i] == 0.0);
  for (size_t i = 3; i < enc.size(); i += 2) {
    CHECK(enc[i] == doctest::Approx(0.0));      // sin
    CHECK(enc[i + 1] == doctest::Approx(1.0));  // cos
  }
}

TEST_CASE("positional_encoding: zero frequencies returns raw coords") {
  const auto enc = positional_encoding({0.1, -0.2, 0.3}, 0);
  REQUIRE(enc.size() == 3);
  CHECK(enc[0] == 0.1);
  CHECK(enc[1] == -0.2);
  CHECK(enc[2] == 0.3);
}

TEST_CASE("positional_encoding: first octave of x") {
  const auto enc = positional_encoding({0.5, 0, 0}, 1);
  REQUIRE(enc.size() == 9);
  CHECK(enc[3] == doctest::Approx(1.0).epsilon(1e-12));  // sin(pi/2)
  CHECK(enc[4] == doctest::Approx(0.0));                 // cos(pi/2)
}

TEST_CASE("positional_encoding: output length property") {
  SplitMix64 rng(11);
  for (int k = 0; k <= 8; ++k) {
    const Point3 p{rng.next_range(-2, 2), rng.next_range(-2, 2),
                   rng.next_range(-2, 2)};
    CHECK(positional_encoding(p, k).size() == 3 + 6 * static_cast<size_t>(k));
  }
}

TEST_CASE("query_field: constant field returns its direction everywhere") {
  const ConstantField field({0, 0, 2});
  const UnitVec3 d = query_field(field, {5, -3, 1});
  CHECK(d.x == 0.0);
  CHECK(d.y == 0.0);
  CHECK(d.z == doctest::Approx(1.0));
}

TEST_CASE("VoxelGridField: node query returns renormalized stored vector") {
  // 2x2x2 grid; node (0,0,0) holds (0, 0, 3) which must come back unit.
  std::vector<float> data(8 * 3, 0.0f);
  for (size_t i = 0; i < 8; ++i) data[3 * i + 2] = 1.0f;
  data[2] = 3.0f;
  const VoxelGridField field(2, 2, 2, {0, 0, 0}, {1, 1, 1}, data);
  const UnitVec3 d = query_field(field, {0, 0, 0});
  CHECK(d.x == 0.0);
  CHECK(d.y == 0.0);
  CHECK(d.z == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("VoxelGridField: midpoint interpolation of two node vectors") {
  // Nodes along x store (1,0,0) and (0,1,0); halfway the trilerp gives
  // (0.5, 0.5, 0) which normalizes to (1/sqrt(2), 1/sqrt(2), 0).
  std::vector<float> data(8 * 3, 0.0f);
  const auto set = [&](int i, int j, int k, float x, float y, float z) {
    const size_t base = 3 * (static_cast<size_t>(k) * 4 + static_cast<size_t>(j) * 2 + i);
    data[base] = x;
    data[base + 1] = y;
    data[base + 2] = z;
  };
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j) {
      set(0, j, k, 1, 0, 0);
      set(1, j, k, 0, 1, 0);
    }
  const VoxelGridField field(2, 2, 2, {0, 0, 0}, {1, 1, 1}, data);
  const UnitVec3 d = query_field(field, {0.5, 0.0, 0.0});
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(d.x == doctest::Approx(inv_sqrt2).epsilon(1e-9));
  CHECK(d.y == doctest::Approx(inv_sqrt2).epsilon(1e-9));
  CHECK(d.z == doctest::Approx(0.0));
}

TEST_CASE("VoxelGridField: queries are always unit within 1e-6") {
  SplitMix64 rng(5);
  std::vector<float> data;
  for (int i = 0; i < 5 * 4 * 3; ++i) {
    const Vec3 v = testutil::random_unit(rng) * rng.next_range(0.2, 3.0);
    data.push_back(static_cast<float>(v.x));
    data.push_back(static_cast<float>(v.y));
    data.push_back(static_cast<float>(v.z));
  }
  const VoxelGridField field(5, 4, 3, {-1, -1, -1}, {1, 1, 1}, data);
  for (int trial = 0; trial < 2000; ++trial) {
    const Point3 p{rng.next_range(-1, 1), rng.next_range(-1, 1),
                   rng.next_range(-1, 1)};
    const auto d = field.try_query(p);
    REQUIRE(d.has_value());
    CHECK(std::abs(d->norm() - 1.0) <= 1e-6);
  }
}

TEST_CASE("VoxelGridField: cancellation falls back to a node vector") {
  std::vector<float> data(8 * 3, 0.0f);
  // Opposing vectors along x cancel exactly at the x midpoint.
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j) {
      const size_t a = 3 * (static_cast<size_t>(k) * 4 + static_cast<size_t>(j) * 2);
      data[a] = 1.0f;
      data[a + 3] = -1.0f;
    }
  const VoxelGridField field(2, 2, 2, {0, 0, 0}, {1, 1, 1}, data);
  const auto d = field.try_query({0.5, 0.5, 0.5});
  REQUIRE(d.has_value());
  CHECK(std::abs(d->norm() - 1.0) <= 1e-9);
  CHECK(std::abs(d->x) == doctest::Approx(1.0));
}

TEST_CASE("VoxelGridField: out of domain") {
  std::vector<float> data(8 * 3, 1.0f);
  const VoxelGridField field(2, 2, 2, {0, 0, 0}, {1, 1, 1}, data);
  CHECK(!field.try_query({2, 0, 0}).has_value());
  CHECK_THROWS_AS(query_field(field, {2, 0, 0}), Error);
}

TEST_CASE("arc_length: degenerate and simple cases") {
  CHECK(arc_length(Fiber{{{1, 2, 3}}}) == 0.0);
  Fiber line;
  for (int i = 0; i < 6; ++i)
    line.points.push_back({0.014 * i, 0.0, 0.0});
  CHECK(arc_length(line) == doctest::Approx(0.070).epsilon(1e-12));
  const Fiber ell{{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}}};
  CHECK(arc_length(ell) == doctest::Approx(2.0));
}

TEST_CASE("resample_fiber: straight line spacing") {
  const Fiber f{{{0, 0, 0}, {1, 0, 0}}};
  const Fiber r = resample_fiber(f, 5);
  REQUIRE(r.size() == 5);
  for (int i = 0; i < 5; ++i)
    CHECK(r.points[static_cast<size_t>(i)].x == doctest::Approx(0.25 * i));
}

TEST_CASE("resample_fiber: identity on an already uniform fiber") {
  Fiber f;
  for (int i = 0; i < 8; ++i)
    f.points.push_back({0.25 * i, 0.0, 0.0});
  const Fiber r = resample_fiber(f, 8);
  for (int i = 0; i < 8; ++i)
    CHECK(distance(r.points[static_cast<size_t>(i)],
                   f.points[static_cast<size_t>(i)]) <= 1e-9);
}

TEST_CASE("resample_fiber: L-shape midpoint lands on the corner") {
  const Fiber f{{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}}};
  const Fiber r = resample_fiber(f, 3);
  REQUIRE(r.size() == 3);
  CHECK(distance(r.points[1], {1, 0, 0}) <= 1e-12);
  CHECK(distance(r.points[0], f.points[0]) == 0.0);
  CHECK(distance(r.points[2], f.points[2]) == 0.0);
}

TEST_CASE("resample_fiber: preserves arc length when corners stay sampled") {
  // Equal-arc resampling puts samples on the source polyline; the output arc
  // is exactly preserved whenever the source corners coincide with samples,
  // i.e. uniform input spacing and (n - 1) a multiple of (count - 1).
  SplitMix64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    Fiber f;
    Point3 p{0, 0, 0};
    const int count = 3 + static_cast<int>(rng.next_below(10));
    const double seg = rng.next_range(0.05, 0.3);
    Vec3 dir = testutil::random_unit(rng);
    f.points.push_back(p);
    for (int i = 1; i < count; ++i) {
      dir = normalized(dir + testutil::random_unit(rng) * 0.4);
      p = p + dir * seg;
      f.points.push_back(p);
    }
    const int mult = 1 + static_cast<int>(rng.next_below(4));
    const int n = (count - 1) * mult + 1;
    const double before = arc_length(f);
    const double after = arc_length(resample_fiber(f, n));
    CHECK(std::abs(after - before) <= 1e-6 * before);
  }
}

TEST_CASE("resample_fiber: near-preserves arc length on gently curving fibers") {
  // Between corner-aligned sample counts the loss is bounded by the corner
  // angles (phi^2/8 per spanned corner).
  SplitMix64 rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    Fiber f;
    Point3 p{0, 0, 0};
    Vec3 dir = testutil::random_unit(rng);
    const int count = 10 + static_cast<int>(rng.next_below(15));
    f.points.push_back(p);
    for (int i = 1; i < count; ++i) {
      dir = normalized(dir + testutil::random_unit(rng) * 0.05);  // < 3 deg
      p = p + dir * 0.014;
      f.points.push_back(p);
    }
    const int n = count + static_cast<int>(rng.next_below(20));
    const double before = arc_length(f);
    const double after = arc_length(resample_fiber(f, n));
    CHECK(after <= before + 1e-12);
    CHECK(std::abs(after - before) <= 1e-3 * before);
  }
}

TEST_CASE("resample_fiber: too short") {
  CHECK_THROWS_AS(resample_fiber(Fiber{{{0, 0, 0}}}, 5), Error);
}

TEST_CASE("sample_surface: barycentric containment on a single triangle") {
  TriMesh mesh;
  mesh.vertices = {{0, 0, 0}, {2, 0, 0}, {0, 3, 0}};
  mesh.triangles = {{0, 1, 2}};
  const auto samples = sample_surface(mesh, 1000, false, 3);
  for (const auto& s : samples) {
    CHECK(s.z == 0.0);
    CHECK(s.x >= -1e-12);
    CHECK(s.y >= -1e-12);
    CHECK(s.x / 2.0 + s.y / 3.0 <= 1.0 + 1e-12);
  }
}

TEST_CASE("sample_surface: area weighting between two triangles") {
  // Areas 0.5 and 1.0; expect counts near 1:2 within 3 sigma.
  TriMesh mesh;
  mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {5, 0, 0}, {7, 0, 0}, {5, 1, 0}};
  mesh.triangles = {{0, 1, 2}, {3, 4, 5}};
  const int n = 3000;
  const auto samples = sample_surface(mesh, n, false, 9);
  int big = 0;
  for (const auto& s : samples) big += s.x >= 4.0;
  const double p = 2.0 / 3.0;
  const double sigma = std::sqrt(n * p * (1 - p));
  CHECK(std::abs(big - n * p) <= 3.0 * sigma);
}

TEST_CASE("sample_surface: deterministic for fixed seed") {
  const TriMesh cube = testutil::make_cube();
  const auto a = sample_surface(cube, 500, false, 42);
  const auto b = sample_surface(cube, 500, false, 42);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("sample_surface: empty region throws") {
  TriMesh mesh = testutil::make_cube();
  mesh.mask.assign(mesh.vertices.size(), 0);
  CHECK_THROWS_AS(sample_surface(mesh, 10, true, 0), Error);
}

TEST_CASE("sample_surface: occupancy chi-squared against area distribution") {
  // Several triangles of very different areas; bin occupancy must match the
  // area distribution (chi-squared, p > 0.001).
  TriMesh mesh;
  SplitMix64 rng(23);
  for (int t = 0; t < 6; ++t) {
    const int base = static_cast<int>(mesh.vertices.size());
    const Vec3 origin{rng.next_range(-5, 5), rng.next_range(-5, 5), 0.0};
    const double sx = rng.next_range(0.2, 2.0);
    const double sy = rng.next_range(0.2, 2.0);
    mesh.vertices.push_back(origin);
    mesh.vertices.push_back(origin + Vec3{sx, 0, 0});
    mesh.vertices.push_back(origin + Vec3{0, sy, 0});
    mesh.triangles.push_back({base, base + 1, base + 2});
  }
  double total_area = 0.0;
  std::vector<double> areas;
  for (const auto& tri : mesh.triangles) {
    areas.push_back(triangle_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                  mesh.vertices[tri[2]]));
    total_area += areas.back();
  }

  const int n = 20000;
  SurfaceSampler sampler(mesh, false, 77);
  std::vector<int> counts(mesh.triangles.size(), 0);
  for (int i = 0; i < n; ++i) {
    sampler.next();
    counts[static_cast<size_t>(sampler.last_triangle())]++;
  }
  double chi2 = 0.0;
  for (size_t t = 0; t < areas.size(); ++t) {
    const double expected = n * areas[t] / total_area;
    chi2 += (counts[t] - expected) * (counts[t] - expected) / expected;
  }
  CHECK(chi2 < 20.515);  // chi-squared 0.999 quantile, 5 dof
}

TEST_CASE("is_watertight: cube yes, open patch no") {
  CHECK(is_watertight(testutil::make_cube()));
  TriMesh patch;
  patch.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
  patch.triangles = {{0, 1, 2}, {1, 3, 2}};
  CHECK(!is_watertight(patch));
}

TEST_CASE("point_in_mesh: cube containment") {
  const TriMesh cube = testutil::make_cube();
  CHECK(point_in_mesh(cube, {0, 0, 0}));
  CHECK(!point_in_mesh(cube, {10, 10, 10}));
  CHECK(point_in_mesh(cube, {0.9, -0.9, 0.3}));
  CHECK(!point_in_mesh(cube, {1.0001, 0, 0}));
}

TEST_CASE("point_in_mesh: dense line crossing flips at the analytic face") {
  const TriMesh cube = testutil::make_cube({0.3, -0.1, 0.2}, 0.7);
  for (int i = 0; i <= 400; ++i) {
    const double t = -2.0 + 4.0 * i / 400.0;
    if (std::abs(std::abs(t - 0.3) - 0.7) < 1e-9) continue;  // exactly on a face
    const Point3 p{t, 0.13, 0.05};
    const bool analytic = std::abs(t - 0.3) < 0.7 &&
                          std::abs(0.13 + 0.1) < 0.7 &&
                          std::abs(0.05 - 0.2) < 0.7;
    CHECK(point_in_mesh(cube, p) == analytic);
  }
}

TEST_CASE("validate_mesh: catches bad indices and degenerate triangles") {
  TriMesh mesh;
  mesh.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  mesh.triangles = {{0, 1, 5}};
  CHECK_THROWS_AS(validate_mesh(mesh), Error);
  mesh.triangles = {{0, 1, 1}};
  CHECK_THROWS_AS(validate_mesh(mesh), Error);
  mesh.triangles = {{0, 1, 2}};
  CHECK_NOTHROW(validate_mesh(mesh));
}
