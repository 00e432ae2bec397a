#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "fibrow/camera.hpp"
#include "fibrow/density.hpp"
#include "fibrow/fiber.hpp"
#include "fibrow/field.hpp"
#include "fibrow/growth.hpp"
#include "fibrow/mesh.hpp"

namespace fibrow {

enum class FieldStyle { constant, arc_tangent, swirl };
enum class LengthMode {
  multinomial,  // per-root levels drawn from level_probs
  hull_cut,     // per-root levels from a probe growth against the hull
};

// Deterministic synthetic eyebrow cases: a curved brow band on an arc, an
// orientation field, ground-truth roots/fibers/levels, a density map and a
// jittered camera. Everything is a pure function of the seed.
struct SynthConfig {
  int root_count = 50;
  uint64_t seed = 0;

  // Band geometry: an arc around `band_center` in the x-y plane, with radial
  // half-width and an out-of-plane bump, triangulated as a quad strip.
  Vec3 band_center = {0.0, -0.2, 0.0};
  double arc_radius = 0.55;
  double arc_start_deg = 50.0;
  double arc_end_deg = 130.0;
  double band_halfwidth = 0.05;
  double z_amp = 0.05;
  int band_res_u = 48;
  int band_res_v = 6;

  // Closed hull: the band solid extruded along z and extended past the arc
  // end, used by mesh-cut growth.
  double hull_half_depth = 0.08;
  double hull_radial_margin = 0.03;
  double hull_extend_deg = 12.0;

  FieldStyle field_style = FieldStyle::arc_tangent;
  Vec3 constant_dir = {1.0, 0.0, 0.0};
  double swirl_pitch = 0.25;
  int field_res = 48;  // voxel field resolution per axis

  LengthMode length_mode = LengthMode::multinomial;
  // Probability per length level starting at level 1. The default follows
  // the observed fiber-length histogram with the open-ended top bucket
  // pinned to its lowest level.
  std::vector<double> level_probs = {0.0023, 0.0126, 0.1024, 0.3682,
                                     0.1751, 0.1301, 0.0956, 0.0590,
                                     0.0286, 0.0129, 0.0060, 0.0072};

  GrowthConfig growth;
  int fiber_points = 20;  // stored ground-truth fibers are resampled to this

  // Camera: perspective, aimed at the band from distance cam_distance along
  // +z, then jittered in spherical coordinates at fixed radius.
  double cam_distance = 4.0;
  double cam_focal_px = 2000.0;
  int image_width = 1500;
  int image_height = 600;
  double jitter_azimuth_deg = 10.0;
  double jitter_polar_deg = 15.0;

  DensityGenConfig density;
  // When > 0, roots are rejection-sampled so projected pairwise distances
  // stay above this and projections keep image_margin_px from the border.
  double min_root_px_sep = 0.0;
  double image_margin_px = 40.0;
};

struct SynthCase {
  TriMesh band;  // brow-band patch (region mask all true)
  TriMesh hull;  // closed solid for mesh-cut tests
  Camera camera;
  RootSet gt_roots;
  FiberSet gt_fibers;  // resampled to cfg.fiber_points points each
  std::vector<int> gt_levels;
  std::shared_ptr<VoxelGridField> field;
  DensityMap gt_density;
};

SynthCase gen_case(const SynthConfig& cfg);

// JSON surface for the synth config: every field optional, unknown keys
// rejected. Keys mirror the struct fields (snake_case).
SynthConfig parse_synth_config_json(const std::string& text);
std::string serialize_synth_config_json(const SynthConfig& cfg);

// The uniform spherical offsets (azimuth, polar), in radians, drawn for a
// seed. Exposed so tests can drive jitter_camera_with directly.
std::pair<double, double> jitter_offsets(uint64_t seed, double azimuth_deg,
                                         double polar_deg);

// Move the camera on its sphere around `target` by the given angle offsets
// (radius fixed), then re-aim it at the target. Intrinsics are preserved.
Camera jitter_camera_with(const Camera& base, const Vec3& target,
                          double d_azimuth_rad, double d_polar_rad);

Camera jitter_camera(const Camera& base, const Vec3& target, uint64_t seed,
                     double azimuth_deg = 10.0, double polar_deg = 15.0);

// Binary stop/continue labels over every prefix of a fiber: proper prefixes
// are positive (keep growing, label 1), the full sequence is the negative
// sample (label 0). Returns (prefix length, label) pairs.
std::vector<std::pair<int, int>> label_subsequences(const Fiber& f);

// Per-pixel 2D unit direction of the projected fibers; (0,0) marks empty
// pixels. Later fibers overwrite earlier ones (painter's order).
struct OrientationMap2D {
  int width = 0;
  int height = 0;
  std::vector<Vec2> dirs;

  const Vec2& at(int ix, int iy) const {
    return dirs[static_cast<size_t>(iy) * width + ix];
  }
  Vec2& at(int ix, int iy) {
    return dirs[static_cast<size_t>(iy) * width + ix];
  }
};

OrientationMap2D rasterize_orientation_map(const FiberSet& fs,
                                           const Camera& camera, int w, int h);

// Write mesh.obj (+mask), hull.obj, camera.json, roots.fib, fibers.fib,
// field.ofld, density.dmap and levels.txt into `dir`.
void write_case(const SynthCase& sc, const std::string& dir);

}  // namespace fibrow
