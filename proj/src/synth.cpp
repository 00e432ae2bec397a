#include "fibrow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "fibrow/errors.hpp"
#include "fibrow/formats.hpp"
#include "fibrow/rng.hpp"

namespace fibrow {

namespace {

Vec3 band_point(const SynthConfig& cfg, double u, double v) {
  const double t =
      deg_to_rad(cfg.arc_start_deg + (cfg.arc_end_deg - cfg.arc_start_deg) * u);
  const Vec3 radial{std::cos(t), std::sin(t), 0.0};
  return cfg.band_center + radial * (cfg.arc_radius + v) +
         Vec3{0.0, 0.0, cfg.z_amp * std::sin(kPi * u)};
}

TriMesh build_band(const SynthConfig& cfg) {
  TriMesh mesh;
  const int nu = cfg.band_res_u;
  const int nv = cfg.band_res_v;
  for (int j = 0; j <= nv; ++j) {
    const double v =
        -cfg.band_halfwidth + 2.0 * cfg.band_halfwidth * j / nv;
    for (int i = 0; i <= nu; ++i)
      mesh.vertices.push_back(band_point(cfg, static_cast<double>(i) / nu, v));
  }
  const auto vid = [&](int i, int j) { return j * (nu + 1) + i; };
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nu; ++i) {
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  mesh.mask.assign(mesh.vertices.size(), 1);
  return mesh;
}

// Closed solid: the band swept band, widened radially and extended past the
// arc end, extruded to +/- hull_half_depth in z, with side walls.
TriMesh build_hull(const SynthConfig& cfg) {
  SynthConfig wide = cfg;
  wide.band_halfwidth = cfg.band_halfwidth + cfg.hull_radial_margin;
  wide.arc_start_deg = cfg.arc_start_deg - 2.0;
  wide.arc_end_deg = cfg.arc_end_deg + cfg.hull_extend_deg;
  wide.z_amp = cfg.z_amp;

  const int nu = cfg.band_res_u;
  const int nv = 2;  // walls only need a coarse cross strip
  TriMesh mesh;
  // Two sheets of (nu+1) x (nv+1) vertices: bottom (z - d), top (z + d).
  for (int sheet = 0; sheet < 2; ++sheet) {
    const double dz = sheet == 0 ? -cfg.hull_half_depth : cfg.hull_half_depth;
    for (int j = 0; j <= nv; ++j) {
      const double v =
          -wide.band_halfwidth + 2.0 * wide.band_halfwidth * j / nv;
      for (int i = 0; i <= nu; ++i) {
        Vec3 p = band_point(wide, static_cast<double>(i) / nu, v);
        p.z += dz;
        mesh.vertices.push_back(p);
      }
    }
  }
  const int sheet_size = (nu + 1) * (nv + 1);
  const auto vid = [&](int sheet, int i, int j) {
    return sheet * sheet_size + j * (nu + 1) + i;
  };
  // Bottom sheet (faces down) and top sheet (faces up).
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nu; ++i) {
      mesh.triangles.push_back(
          {vid(0, i, j), vid(0, i + 1, j + 1), vid(0, i + 1, j)});
      mesh.triangles.push_back(
          {vid(0, i, j), vid(0, i, j + 1), vid(0, i + 1, j + 1)});
      mesh.triangles.push_back(
          {vid(1, i, j), vid(1, i + 1, j), vid(1, i + 1, j + 1)});
      mesh.triangles.push_back(
          {vid(1, i, j), vid(1, i + 1, j + 1), vid(1, i, j + 1)});
    }
  // Walls along the two long edges (j = 0 and j = nv).
  for (int i = 0; i < nu; ++i) {
    mesh.triangles.push_back({vid(0, i, 0), vid(0, i + 1, 0), vid(1, i + 1, 0)});
    mesh.triangles.push_back({vid(0, i, 0), vid(1, i + 1, 0), vid(1, i, 0)});
    mesh.triangles.push_back({vid(0, i, nv), vid(1, i + 1, nv), vid(0, i + 1, nv)});
    mesh.triangles.push_back({vid(0, i, nv), vid(1, i, nv), vid(1, i + 1, nv)});
  }
  // End caps at i = 0 and i = nu.
  for (int j = 0; j < nv; ++j) {
    mesh.triangles.push_back({vid(0, 0, j), vid(1, 0, j), vid(1, 0, j + 1)});
    mesh.triangles.push_back({vid(0, 0, j), vid(1, 0, j + 1), vid(0, 0, j + 1)});
    mesh.triangles.push_back({vid(0, nu, j), vid(1, nu, j + 1), vid(1, nu, j)});
    mesh.triangles.push_back({vid(0, nu, j), vid(0, nu, j + 1), vid(1, nu, j + 1)});
  }
  return mesh;
}

std::unique_ptr<OrientationField> build_analytic_field(const SynthConfig& cfg) {
  switch (cfg.field_style) {
    case FieldStyle::constant:
      return std::make_unique<ConstantField>(cfg.constant_dir);
    case FieldStyle::arc_tangent:
      return std::make_unique<ArcField>(cfg.band_center, Vec3{0, 0, 1}, 0.0);
    case FieldStyle::swirl:
      return std::make_unique<ArcField>(cfg.band_center, Vec3{0, 0, 1},
                                        cfg.swirl_pitch);
  }
  fail(Errc::config_invalid, "gen_case: unknown field style");
}

int draw_level(const std::vector<double>& probs, SplitMix64& rng) {
  const double r = rng.next_double();
  double acc = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (r < acc) return static_cast<int>(i) + 1;
  }
  return static_cast<int>(probs.size());
}

}  // namespace

std::pair<double, double> jitter_offsets(uint64_t seed, double azimuth_deg,
                                         double polar_deg) {
  SplitMix64 rng(seed);
  const double da = rng.next_range(-deg_to_rad(azimuth_deg),
                                   deg_to_rad(azimuth_deg));
  const double dp = rng.next_range(-deg_to_rad(polar_deg),
                                   deg_to_rad(polar_deg));
  return {da, dp};
}

Camera jitter_camera_with(const Camera& base, const Vec3& target,
                          double d_azimuth_rad, double d_polar_rad) {
  const Vec3 offset = base.center() - target;
  const double radius = offset.norm();
  if (radius < 1e-12)
    fail(Errc::config_invalid, "jitter_camera: camera sits on the target");
  // Spherical about the target: polar from +z, azimuth in the x-y plane.
  const double polar = std::acos(std::clamp(offset.z / radius, -1.0, 1.0));
  const double azimuth = std::atan2(offset.y, offset.x);
  const double new_polar = polar + d_polar_rad;
  const double new_azimuth =
      (std::abs(std::sin(polar)) < 1e-9 ? 0.0 : azimuth) + d_azimuth_rad;
  const Vec3 new_pos =
      target + Vec3{std::sin(new_polar) * std::cos(new_azimuth),
                    std::sin(new_polar) * std::sin(new_azimuth),
                    std::cos(new_polar)} * radius;
  Camera cam = look_at(base.mode, new_pos, target);
  cam.fx = base.fx;
  cam.fy = base.fy;
  cam.cx = base.cx;
  cam.cy = base.cy;
  cam.width = base.width;
  cam.height = base.height;
  return cam;
}

Camera jitter_camera(const Camera& base, const Vec3& target, uint64_t seed,
                     double azimuth_deg, double polar_deg) {
  const auto [da, dp] = jitter_offsets(seed, azimuth_deg, polar_deg);
  return jitter_camera_with(base, target, da, dp);
}

SynthCase gen_case(const SynthConfig& cfg) {
  if (cfg.root_count < 1)
    fail(Errc::config_invalid, "gen_case: root_count must be >= 1");
  if (cfg.level_probs.empty())
    fail(Errc::config_invalid, "gen_case: empty level distribution");
  double prob_sum = 0.0;
  for (double p : cfg.level_probs) {
    if (p < 0.0) fail(Errc::config_invalid, "gen_case: negative probability");
    prob_sum += p;
  }
  if (std::abs(prob_sum - 1.0) > 0.05)
    fail(Errc::config_invalid, "gen_case: level probabilities must sum to 1");
  if (cfg.fiber_points < 2)
    fail(Errc::config_invalid, "gen_case: fiber_points must be >= 2");

  SynthCase sc;
  sc.band = build_band(cfg);
  sc.hull = build_hull(cfg);

  const SplitMix64 master(cfg.seed);

  // Camera first; root placement constraints live in image space.
  const Vec3 target = bounds(sc.band).center();
  Camera base = look_at(CameraMode::perspective,
                        target + Vec3{0.0, 0.0, cfg.cam_distance}, target);
  base.fx = base.fy = cfg.cam_focal_px;
  base.cx = cfg.image_width / 2.0;
  base.cy = cfg.image_height / 2.0;
  base.width = cfg.image_width;
  base.height = cfg.image_height;
  sc.camera = jitter_camera(base, target, master.fork(1).next_u64(),
                            cfg.jitter_azimuth_deg, cfg.jitter_polar_deg);

  // Roots on the band; optionally rejection-sampled for projected spacing.
  SurfaceSampler sampler(sc.band, /*region_only=*/true,
                         master.fork(2).next_u64());
  std::vector<Root2D> projections;
  const double min_sep2 = cfg.min_root_px_sep * cfg.min_root_px_sep;
  const long max_attempts = 1000l * cfg.root_count;
  long attempts = 0;
  while (sc.gt_roots.size() < cfg.root_count) {
    if (++attempts > max_attempts)
      fail(Errc::config_invalid,
           "gen_case: cannot place roots with the requested separation");
    const Point3 p = sampler.next();
    const Vec2 uv = project(sc.camera, p);
    if (uv.x < cfg.image_margin_px ||
        uv.x >= cfg.image_width - cfg.image_margin_px ||
        uv.y < cfg.image_margin_px ||
        uv.y >= cfg.image_height - cfg.image_margin_px)
      continue;
    if (cfg.min_root_px_sep > 0.0) {
      bool ok = true;
      for (const auto& q : projections)
        if (distance2(q, uv) < min_sep2) {
          ok = false;
          break;
        }
      if (!ok) continue;
    }
    sc.gt_roots.roots.push_back(p);
    projections.push_back(uv);
  }

  // Materialize the field as a voxel grid so growth through the written
  // OFLD file reproduces the ground truth exactly.
  const auto analytic = build_analytic_field(cfg);
  Box3 field_box = bounds(sc.band);
  field_box.grow(bounds(sc.hull));
  field_box = field_box.expanded(
      cfg.growth.step * (cfg.growth.max_steps + 2) * 0.15 + 0.15);
  sc.field = std::make_shared<VoxelGridField>(VoxelGridField::sample(
      *analytic, field_box, cfg.field_res, cfg.field_res, cfg.field_res));

  // Length levels.
  if (cfg.length_mode == LengthMode::multinomial) {
    SplitMix64 level_rng = master.fork(3);
    sc.gt_levels.reserve(static_cast<size_t>(cfg.root_count));
    for (int i = 0; i < cfg.root_count; ++i)
      sc.gt_levels.push_back(draw_level(cfg.level_probs, level_rng));
  } else {
    const MeshCutEnder probe(sc.hull);
    for (const auto& root : sc.gt_roots.roots) {
      const Fiber f = grow_fiber(root, *sc.field, probe, cfg.growth);
      const int level = f.size() - 1;
      if (level < 1)
        fail(Errc::config_invalid,
             "gen_case: hull-cut probe produced a rootless fiber");
      sc.gt_levels.push_back(level);
    }
  }

  // Ground-truth fibers, grown with the per-root level ender then resampled
  // to the stored point count.
  const LengthTableEnder ender(sc.gt_levels);
  const GrowReport grown =
      grow_all(sc.gt_roots, *sc.field, ender, cfg.growth);
  if (!grown.failures.empty() || grown.fibers.size() != cfg.root_count)
    fail(Errc::config_invalid, "gen_case: ground-truth growth failed");
  for (int i = 0; i < grown.fibers.size(); ++i)
    if (grown.fibers.fibers[static_cast<size_t>(i)].size() !=
        sc.gt_levels[static_cast<size_t>(i)] + 1)
      fail(Errc::config_invalid,
           "gen_case: fiber stopped before its level (field box too small?)");
  sc.gt_fibers.step = cfg.growth.step;
  for (const auto& f : grown.fibers.fibers)
    sc.gt_fibers.fibers.push_back(resample_fiber(f, cfg.fiber_points));

  sc.gt_density = density_from_roots(projections, cfg.image_width,
                                     cfg.image_height, cfg.density);
  return sc;
}

std::vector<std::pair<int, int>> label_subsequences(const Fiber& f) {
  if (f.size() < 2)
    fail(Errc::too_short, "label_subsequences: fiber has fewer than 2 points");
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<size_t>(f.size()));
  for (int len = 1; len < f.size(); ++len) out.push_back({len, 1});
  out.push_back({f.size(), 0});
  return out;
}

OrientationMap2D rasterize_orientation_map(const FiberSet& fs,
                                           const Camera& camera, int w,
                                           int h) {
  if (w <= 0 || h <= 0)
    fail(Errc::config_invalid, "rasterize_orientation_map: bad dimensions");
  OrientationMap2D map;
  map.width = w;
  map.height = h;
  map.dirs.assign(static_cast<size_t>(w) * h, Vec2{0.0, 0.0});

  for (const auto& fiber : fs.fibers) {
    for (size_t i = 1; i < fiber.points.size(); ++i) {
      const Point3& a3 = fiber.points[i - 1];
      const Point3& b3 = fiber.points[i];
      if (camera.mode == CameraMode::perspective &&
          (camera.to_camera(a3).z <= 1e-9 || camera.to_camera(b3).z <= 1e-9))
        continue;
      const Vec2 a = project(camera, a3);
      const Vec2 b = project(camera, b3);
      const Vec2 d = b - a;
      const double len = d.norm();
      if (len < 1e-12) continue;
      const Vec2 dir{d.x / len, d.y / len};
      const int steps = std::max(1, static_cast<int>(std::ceil(len / 0.5)));
      for (int s = 0; s <= steps; ++s) {
        const double t = static_cast<double>(s) / steps;
        const int ix = static_cast<int>(std::floor(a.x + d.x * t));
        const int iy = static_cast<int>(std::floor(a.y + d.y * t));
        if (ix < 0 || iy < 0 || ix >= w || iy >= h) continue;
        map.at(ix, iy) = dir;
      }
    }
  }
  return map;
}

namespace {

using json = nlohmann::json;

const char* field_style_name(FieldStyle s) {
  switch (s) {
    case FieldStyle::constant: return "constant";
    case FieldStyle::arc_tangent: return "arc-tangent";
    case FieldStyle::swirl: return "swirl";
  }
  return "?";
}

FieldStyle field_style_from(const std::string& name) {
  if (name == "constant") return FieldStyle::constant;
  if (name == "arc-tangent") return FieldStyle::arc_tangent;
  if (name == "swirl") return FieldStyle::swirl;
  fail(Errc::config_invalid, "synth config: unknown field_style '" + name + "'");
}

}  // namespace

SynthConfig parse_synth_config_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::config_invalid,
         std::string("synth config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object())
    fail(Errc::config_invalid, "synth config: expected a JSON object");

  SynthConfig cfg;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "root_count") cfg.root_count = value.get<int>();
      else if (key == "seed") cfg.seed = value.get<uint64_t>();
      else if (key == "band_center") {
        cfg.band_center = {value.at(0).get<double>(), value.at(1).get<double>(),
                           value.at(2).get<double>()};
      } else if (key == "arc_radius") cfg.arc_radius = value.get<double>();
      else if (key == "arc_start_deg") cfg.arc_start_deg = value.get<double>();
      else if (key == "arc_end_deg") cfg.arc_end_deg = value.get<double>();
      else if (key == "band_halfwidth") cfg.band_halfwidth = value.get<double>();
      else if (key == "z_amp") cfg.z_amp = value.get<double>();
      else if (key == "band_res_u") cfg.band_res_u = value.get<int>();
      else if (key == "band_res_v") cfg.band_res_v = value.get<int>();
      else if (key == "hull_half_depth") cfg.hull_half_depth = value.get<double>();
      else if (key == "hull_radial_margin") cfg.hull_radial_margin = value.get<double>();
      else if (key == "hull_extend_deg") cfg.hull_extend_deg = value.get<double>();
      else if (key == "field_style") cfg.field_style = field_style_from(value.get<std::string>());
      else if (key == "constant_dir") {
        cfg.constant_dir = {value.at(0).get<double>(), value.at(1).get<double>(),
                            value.at(2).get<double>()};
      } else if (key == "swirl_pitch") cfg.swirl_pitch = value.get<double>();
      else if (key == "field_res") cfg.field_res = value.get<int>();
      else if (key == "length_mode") {
        const std::string mode = value.get<std::string>();
        if (mode == "multinomial") cfg.length_mode = LengthMode::multinomial;
        else if (mode == "hull-cut") cfg.length_mode = LengthMode::hull_cut;
        else fail(Errc::config_invalid, "synth config: unknown length_mode '" + mode + "'");
      } else if (key == "level_probs") cfg.level_probs = value.get<std::vector<double>>();
      else if (key == "step") cfg.growth.step = value.get<double>();
      else if (key == "theta_deg") cfg.growth.theta_deg = value.get<double>();
      else if (key == "max_steps") cfg.growth.max_steps = value.get<int>();
      else if (key == "fiber_points") cfg.fiber_points = value.get<int>();
      else if (key == "cam_distance") cfg.cam_distance = value.get<double>();
      else if (key == "cam_focal_px") cfg.cam_focal_px = value.get<double>();
      else if (key == "image_width") cfg.image_width = value.get<int>();
      else if (key == "image_height") cfg.image_height = value.get<int>();
      else if (key == "jitter_azimuth_deg") cfg.jitter_azimuth_deg = value.get<double>();
      else if (key == "jitter_polar_deg") cfg.jitter_polar_deg = value.get<double>();
      else if (key == "density_knn_k") cfg.density.knn_k = value.get<int>();
      else if (key == "density_beta") cfg.density.beta = value.get<double>();
      else if (key == "density_sigma_min") cfg.density.sigma_min = value.get<double>();
      else if (key == "density_sigma_max") cfg.density.sigma_max = value.get<double>();
      else if (key == "density_truncation_radius") cfg.density.truncation_radius = value.get<double>();
      else if (key == "min_root_px_sep") cfg.min_root_px_sep = value.get<double>();
      else if (key == "image_margin_px") cfg.image_margin_px = value.get<double>();
      else fail(Errc::config_invalid, "synth config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    fail(Errc::config_invalid, std::string("synth config: bad value: ") + e.what());
  }
  return cfg;
}

std::string serialize_synth_config_json(const SynthConfig& cfg) {
  json doc;
  doc["root_count"] = cfg.root_count;
  doc["seed"] = cfg.seed;
  doc["band_center"] = {cfg.band_center.x, cfg.band_center.y, cfg.band_center.z};
  doc["arc_radius"] = cfg.arc_radius;
  doc["arc_start_deg"] = cfg.arc_start_deg;
  doc["arc_end_deg"] = cfg.arc_end_deg;
  doc["band_halfwidth"] = cfg.band_halfwidth;
  doc["z_amp"] = cfg.z_amp;
  doc["band_res_u"] = cfg.band_res_u;
  doc["band_res_v"] = cfg.band_res_v;
  doc["hull_half_depth"] = cfg.hull_half_depth;
  doc["hull_radial_margin"] = cfg.hull_radial_margin;
  doc["hull_extend_deg"] = cfg.hull_extend_deg;
  doc["field_style"] = field_style_name(cfg.field_style);
  doc["constant_dir"] = {cfg.constant_dir.x, cfg.constant_dir.y, cfg.constant_dir.z};
  doc["swirl_pitch"] = cfg.swirl_pitch;
  doc["field_res"] = cfg.field_res;
  doc["length_mode"] =
      cfg.length_mode == LengthMode::multinomial ? "multinomial" : "hull-cut";
  doc["level_probs"] = cfg.level_probs;
  doc["step"] = cfg.growth.step;
  doc["theta_deg"] = cfg.growth.theta_deg;
  doc["max_steps"] = cfg.growth.max_steps;
  doc["fiber_points"] = cfg.fiber_points;
  doc["cam_distance"] = cfg.cam_distance;
  doc["cam_focal_px"] = cfg.cam_focal_px;
  doc["image_width"] = cfg.image_width;
  doc["image_height"] = cfg.image_height;
  doc["jitter_azimuth_deg"] = cfg.jitter_azimuth_deg;
  doc["jitter_polar_deg"] = cfg.jitter_polar_deg;
  doc["density_knn_k"] = cfg.density.knn_k;
  doc["density_beta"] = cfg.density.beta;
  doc["density_sigma_min"] = cfg.density.sigma_min;
  doc["density_sigma_max"] = cfg.density.sigma_max;
  doc["density_truncation_radius"] = cfg.density.truncation_radius;
  doc["min_root_px_sep"] = cfg.min_root_px_sep;
  doc["image_margin_px"] = cfg.image_margin_px;
  return doc.dump(2) + "\n";
}

void write_case(const SynthCase& sc, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto path = [&](const char* name) {
    return (std::filesystem::path(dir) / name).string();
  };
  save_obj(path("mesh.obj"), sc.band, /*write_mask=*/true);
  save_obj(path("hull.obj"), sc.hull);
  write_camera(path("camera.json"), sc.camera);
  write_fib(path("roots.fib"), roots_to_fiberset(sc.gt_roots));
  write_fib(path("fibers.fib"), sc.gt_fibers);
  write_ofld(path("field.ofld"), *sc.field);
  write_dmap(path("density.dmap"), sc.gt_density);
  write_levels(path("levels.txt"), sc.gt_levels);
}

}  // namespace fibrow
