// fibrow: batch CLI for density-based root localization, field-guided fiber
// growth and the reconstruction metric suite.
//
// Exit codes: 0 ok, 2 input/parse error, 3 empty result, 4 bad ending-policy
// spec, 5 empty metric input.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fibrow/errors.hpp"
#include "fibrow/formats.hpp"
#include "fibrow/growth.hpp"
#include "fibrow/metrics.hpp"
#include "fibrow/rootfind.hpp"
#include "fibrow/synth.hpp"

namespace {

using namespace fibrow;

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitEmptyResult = 3;
constexpr int kExitBadEnder = 4;
constexpr int kExitEmptyMetricInput = 5;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::empty_set:
    case Errc::both_empty:
    case Errc::too_short:
      return kExitEmptyMetricInput;
    case Errc::not_watertight:
    case Errc::missing_root:
      return kExitBadEnder;
    default:
      return kExitParse;
  }
}

void summary(const std::string& line) { std::cerr << "SUMMARY " << line << "\n"; }

// ---------------------------------------------------------------------------

struct ExtractArgs {
  std::string density_path, camera_path, mesh_path, mask_path, out_path;
  double tau = -1.0;  // < 0: 0.2 x map maximum
  double eps = 3.0;
  int min_pts = 4;
  int samples = 20000;
  uint64_t seed = 0;
  bool global_kmeans = false;
  bool weight_by_density = false;
};

int run_extract_roots(const ExtractArgs& args) {
  const DensityMap map = read_dmap(args.density_path);
  const Camera camera = read_camera(args.camera_path);
  TriMesh mesh = load_obj(args.mesh_path);
  if (!args.mask_path.empty()) {
    // Explicit mask file overrides any companion .mask.
    std::vector<uint8_t> mask;
    for (int v : parse_levels(read_file_text(args.mask_path)))
      mask.push_back(v != 0);
    if (mask.size() != mesh.vertices.size())
      fail(Errc::count_mismatch, "mask does not match mesh vertex count");
    mesh.mask = std::move(mask);
  }
  validate_mesh(mesh);

  const double tau = args.tau < 0.0 ? default_threshold(map) : args.tau;
  ExtractParams params;
  params.eps = args.eps;
  params.min_pts = args.min_pts;
  params.seed = args.seed;
  params.global_kmeans = args.global_kmeans;
  params.weight_by_density = args.weight_by_density;
  const std::vector<Root2D> roots2d = extract_roots_2d(map, tau, params);
  if (roots2d.empty()) {
    summary("extract-roots clusters=0 roots=0 (no clusters)");
    std::cerr << "error: no clusters found in density map\n";
    return kExitEmptyResult;
  }
  const RootSet roots =
      lift_roots(roots2d, camera, mesh, args.samples, args.seed);
  write_fib(args.out_path, roots_to_fiberset(roots));
  summary("extract-roots tau=" + std::to_string(tau) +
          " clusters=" + std::to_string(roots2d.size()) +
          " roots=" + std::to_string(roots.size()));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct GrowArgs {
  std::string roots_path, field_path, ender_spec, out_path;
  GrowthConfig cfg;
  int threads = 1;
};

std::unique_ptr<EndingPolicy> parse_ender(const std::string& spec,
                                          int root_count) {
  const auto bad = [&](const std::string& why) -> std::unique_ptr<EndingPolicy> {
    fail(Errc::config_invalid, "ender spec '" + spec + "': " + why);
  };
  const size_t colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg =
      colon == std::string::npos ? "" : spec.substr(colon + 1);
  try {
    if (kind == "mean-length")
      return mean_length_ender(arg.empty() ? 0.0714 : std::stod(arg));
    if (kind == "max-steps") {
      if (arg.empty()) return bad("max-steps needs a count");
      return max_steps_ender(std::stoi(arg));
    }
    if (kind == "mesh") {
      if (arg.empty()) return bad("mesh needs a path");
      return mesh_cut_ender(load_obj(arg));
    }
    if (kind == "table") {
      if (arg.empty()) return bad("table needs a path");
      std::vector<int> table = read_levels(arg);
      if (static_cast<int>(table.size()) < root_count)
        fail(Errc::missing_root,
             "length table has " + std::to_string(table.size()) +
                 " entries for " + std::to_string(root_count) + " roots");
      return length_table_ender(std::move(table));
    }
  } catch (const std::invalid_argument&) {
    return bad("bad numeric argument");
  } catch (const std::out_of_range&) {
    return bad("numeric argument out of range");
  }
  return bad("unknown kind (use mean-length[:len], mesh:path, max-steps:N, table:path)");
}

int run_grow(const GrowArgs& args) {
  const RootSet roots = fiberset_to_roots(read_fib(args.roots_path));
  const VoxelGridField field = read_ofld(args.field_path);

  std::unique_ptr<EndingPolicy> ender;
  try {
    ender = parse_ender(args.ender_spec, roots.size());
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadEnder;
  }

  summary("grow roots=" + std::to_string(roots.size()) +
          " ender=" + args.ender_spec + " step=" + std::to_string(args.cfg.step) +
          " theta=" + std::to_string(args.cfg.theta_deg) +
          " max_steps=" + std::to_string(args.cfg.max_steps));
  const GrowReport report =
      grow_all(roots, field, *ender, args.cfg, args.threads);
  for (const auto& failure : report.failures)
    std::cerr << "warning: root " << failure.root_index << ": "
              << failure.message << "\n";
  write_fib(args.out_path, report.fibers);
  summary("grow fibers=" + std::to_string(report.fibers.size()) +
          " failures=" + std::to_string(report.failures.size()));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string pred_path, gt_path, report_path;
  EvalParams params;
};

int run_evaluate(const EvaluateArgs& args) {
  const FiberSet pred = read_fib(args.pred_path);
  const FiberSet gt = read_fib(args.gt_path);
  const MetricsReport report = evaluate(pred, gt, args.params);
  write_report(args.report_path, report);
  std::string phis;
  for (double phi : report.phis) phis += (phis.empty() ? "" : ",") + std::to_string(phi);
  summary("evaluate pred=" + std::to_string(pred.size()) +
          " gt=" + std::to_string(gt.size()) + " phi=" + phis +
          " iou=" + std::to_string(report.iou_value) +
          " fdo=" + std::to_string(report.fdo_value));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string config_path;
  std::string out_dir;
  int root_count = -1;
  long seed = -1;
  std::string field_style;
  std::string length_mode;
  double min_root_px_sep = -1.0;
};

int run_synth(const SynthArgs& args) {
  SynthConfig cfg;
  if (!args.config_path.empty())
    cfg = parse_synth_config_json(read_file_text(args.config_path));
  if (args.root_count > 0) cfg.root_count = args.root_count;
  if (args.seed >= 0) cfg.seed = static_cast<uint64_t>(args.seed);
  if (args.min_root_px_sep >= 0.0) cfg.min_root_px_sep = args.min_root_px_sep;
  if (!args.field_style.empty()) {
    if (args.field_style == "constant") cfg.field_style = FieldStyle::constant;
    else if (args.field_style == "arc-tangent") cfg.field_style = FieldStyle::arc_tangent;
    else if (args.field_style == "swirl") cfg.field_style = FieldStyle::swirl;
    else fail(Errc::config_invalid, "unknown field style '" + args.field_style + "'");
  }
  if (!args.length_mode.empty()) {
    if (args.length_mode == "multinomial") cfg.length_mode = LengthMode::multinomial;
    else if (args.length_mode == "hull-cut") cfg.length_mode = LengthMode::hull_cut;
    else fail(Errc::config_invalid, "unknown length mode '" + args.length_mode + "'");
  }
  const SynthCase sc = gen_case(cfg);
  write_case(sc, args.out_dir);
  summary("synth out=" + args.out_dir + " roots=" + std::to_string(sc.gt_roots.size()) +
          " fibers=" + std::to_string(sc.gt_fibers.size()) +
          " seed=" + std::to_string(cfg.seed));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ExportObjArgs {
  std::string fibers_path, out_path;
  double radius = 0.004;
  int sides = 6;
};

// Sweep a fiber into a prism tube: one ring of `sides` vertices per point,
// frames parallel-transported along the polyline, fan-triangulated caps.
void append_tube(const Fiber& fiber, double radius, int sides, TriMesh& mesh) {
  const int n = fiber.size();
  std::vector<Vec3> dirs(static_cast<size_t>(n));
  for (int i = 0; i + 1 < n; ++i)
    dirs[static_cast<size_t>(i)] = normalized_or(
        fiber.points[static_cast<size_t>(i) + 1] - fiber.points[static_cast<size_t>(i)],
        Vec3{1, 0, 0});
  dirs[static_cast<size_t>(n) - 1] = dirs[static_cast<size_t>(n) - 2];

  // Initial frame orthogonal to the first direction.
  Vec3 ref = std::abs(dirs[0].x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 u = normalized(cross(dirs[0], ref));
  Vec3 v = cross(dirs[0], u);

  const int base = static_cast<int>(mesh.vertices.size());
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      // Rotate the frame by the minimal rotation between directions.
      const Vec3& d0 = dirs[static_cast<size_t>(i) - 1];
      const Vec3& d1 = dirs[static_cast<size_t>(i)];
      const Vec3 axis = cross(d0, d1);
      const double s = axis.norm();
      const double c = dot(d0, d1);
      if (s > 1e-12) {
        const Vec3 a = axis * (1.0 / s);
        const auto rotate = [&](const Vec3& w) {
          return w * c + cross(a, w) * s + a * (dot(a, w) * (1.0 - c));
        };
        u = rotate(u);
        v = rotate(v);
      }
    }
    for (int s_i = 0; s_i < sides; ++s_i) {
      const double ang = 2.0 * kPi * s_i / sides;
      mesh.vertices.push_back(fiber.points[static_cast<size_t>(i)] +
                              u * (radius * std::cos(ang)) +
                              v * (radius * std::sin(ang)));
    }
  }
  const auto ring = [&](int i, int s_i) { return base + i * sides + (s_i % sides); };
  for (int i = 0; i + 1 < n; ++i)
    for (int s_i = 0; s_i < sides; ++s_i) {
      mesh.triangles.push_back({ring(i, s_i), ring(i + 1, s_i), ring(i + 1, s_i + 1)});
      mesh.triangles.push_back({ring(i, s_i), ring(i + 1, s_i + 1), ring(i, s_i + 1)});
    }
  for (int s_i = 1; s_i + 1 < sides; ++s_i) {
    mesh.triangles.push_back({ring(0, 0), ring(0, s_i + 1), ring(0, s_i)});
    mesh.triangles.push_back({ring(n - 1, 0), ring(n - 1, s_i), ring(n - 1, s_i + 1)});
  }
}

int run_export_obj(const ExportObjArgs& args) {
  if (args.sides < 3) fail(Errc::config_invalid, "export-obj: sides must be >= 3");
  if (args.radius <= 0.0) fail(Errc::config_invalid, "export-obj: radius must be > 0");
  const FiberSet fs = read_fib(args.fibers_path);
  TriMesh mesh;
  int skipped = 0;
  for (const auto& f : fs.fibers) {
    if (f.size() < 2) {
      ++skipped;
      continue;
    }
    append_tube(f, args.radius, args.sides, mesh);
  }
  if (mesh.vertices.empty())
    fail(Errc::empty_set, "export-obj: no fibers with >= 2 points");
  save_obj(args.out_path, mesh);
  summary("export-obj fibers=" + std::to_string(fs.size() - skipped) +
          " skipped=" + std::to_string(skipped) +
          " vertices=" + std::to_string(mesh.vertices.size()));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct DensityArgs {
  std::string roots_path, camera_path, out_path;
  int width = 1500, height = 600;
  DensityGenConfig cfg;
};

int run_density_from_roots(const DensityArgs& args) {
  const RootSet roots = fiberset_to_roots(read_fib(args.roots_path));
  const Camera camera = read_camera(args.camera_path);
  std::vector<Root2D> projected;
  int dropped = 0;
  for (const auto& r : roots.roots) {
    if (camera.mode == CameraMode::perspective &&
        camera.to_camera(r).z <= 1e-9) {
      ++dropped;
      continue;
    }
    const Vec2 uv = project(camera, r);
    if (uv.x < 0.0 || uv.x >= args.width || uv.y < 0.0 || uv.y >= args.height) {
      ++dropped;
      continue;
    }
    projected.push_back(uv);
  }
  const DensityMap map =
      density_from_roots(projected, args.width, args.height, args.cfg);
  write_dmap(args.out_path, map);
  summary("density-from-roots roots=" + std::to_string(projected.size()) +
          " dropped=" + std::to_string(dropped) +
          " knn_k=" + std::to_string(args.cfg.knn_k) +
          " beta=" + std::to_string(args.cfg.beta));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fibrow: fiber-level eyebrow reconstruction toolkit"};
  app.require_subcommand(1);

  ExtractArgs extract;
  auto* cmd_extract = app.add_subcommand(
      "extract-roots", "Localize 3D roots from a density map");
  cmd_extract->add_option("--density", extract.density_path, "DMAP density map")->required();
  cmd_extract->add_option("--camera", extract.camera_path, "camera JSON")->required();
  cmd_extract->add_option("--mesh", extract.mesh_path, "surface mesh OBJ")->required();
  cmd_extract->add_option("--mask", extract.mask_path, "per-vertex 0/1 region mask file");
  cmd_extract->add_option("--out", extract.out_path, "output roots FIB")->required();
  cmd_extract->add_option("--tau", extract.tau, "candidate threshold (default 0.2 x map max)");
  cmd_extract->add_option("--eps", extract.eps, "DBSCAN radius in px")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_extract->add_option("--min-pts", extract.min_pts, "DBSCAN core size")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_extract->add_option("--samples", extract.samples, "surface samples for lifting")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_extract->add_option("--seed", extract.seed, "RNG seed")->capture_default_str();
  cmd_extract->add_flag("--global-kmeans", extract.global_kmeans,
                        "one global K-Means instead of per-cluster centers");
  cmd_extract->add_flag("--weight-by-density", extract.weight_by_density,
                        "weight candidates by density value");

  GrowArgs grow;
  auto* cmd_grow = app.add_subcommand("grow", "Grow fibers through an orientation field");
  cmd_grow->add_option("--roots", grow.roots_path, "roots FIB")->required();
  cmd_grow->add_option("--field", grow.field_path, "OFLD orientation field")->required();
  cmd_grow->add_option("--ender", grow.ender_spec,
                       "mean-length[:len] | mesh:path | max-steps:N | table:path")->required();
  cmd_grow->add_option("--out", grow.out_path, "output fibers FIB")->required();
  cmd_grow->add_option("--step", grow.cfg.step, "growing step")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_grow->add_option("--theta", grow.cfg.theta_deg, "smoothing threshold in degrees")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_grow->add_option("--max-steps", grow.cfg.max_steps, "hard cap on steps per fiber")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_grow->add_option("--threads", grow.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  EvaluateArgs eval;
  auto* cmd_eval = app.add_subcommand("evaluate", "Metric suite between two fiber files");
  cmd_eval->add_option("--pred", eval.pred_path, "predicted fibers FIB")->required();
  cmd_eval->add_option("--gt", eval.gt_path, "ground-truth fibers FIB")->required();
  cmd_eval->add_option("--report", eval.report_path, "output JSON report")->required();
  cmd_eval->add_option("--phi", eval.params.phis, "neighborhood radii")->capture_default_str();
  cmd_eval->add_option("--fdo-n", eval.params.fdo_n, "directions per fiber")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_eval->add_option("--radius", eval.params.radius, "capsule radius for IoU")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_eval->add_option("--grid-res", eval.params.grid_res, "voxels per unit for IoU")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_eval->add_option("--step", eval.params.step, "length-level step")->check(CLI::PositiveNumber)->capture_default_str();

  SynthArgs synth;
  auto* cmd_synth = app.add_subcommand("synth", "Generate a synthetic ground-truth case");
  cmd_synth->add_option("--config", synth.config_path, "JSON config file");
  cmd_synth->add_option("--out", synth.out_dir, "output case directory")->required();
  cmd_synth->add_option("--root-count", synth.root_count, "number of roots");
  cmd_synth->add_option("--seed", synth.seed, "RNG seed");
  cmd_synth->add_option("--field-style", synth.field_style, "constant | arc-tangent | swirl");
  cmd_synth->add_option("--length-mode", synth.length_mode, "multinomial | hull-cut");
  cmd_synth->add_option("--min-sep", synth.min_root_px_sep, "min projected root separation in px");

  ExportObjArgs export_obj;
  auto* cmd_export = app.add_subcommand("export-obj", "Sweep fibers into OBJ tubes");
  cmd_export->add_option("--fibers", export_obj.fibers_path, "fibers FIB")->required();
  cmd_export->add_option("--out", export_obj.out_path, "output OBJ")->required();
  cmd_export->add_option("--radius", export_obj.radius, "tube radius")->capture_default_str();
  cmd_export->add_option("--sides", export_obj.sides, "tube cross-section sides")->capture_default_str();

  DensityArgs density;
  auto* cmd_density = app.add_subcommand("density-from-roots",
                                         "Project roots and render a density map");
  cmd_density->set_help_flag("--help", "print help");  // frees -h for --h
  cmd_density->add_option("--roots", density.roots_path, "roots FIB")->required();
  cmd_density->add_option("--camera", density.camera_path, "camera JSON")->required();
  cmd_density->add_option("--out", density.out_path, "output DMAP")->required();
  cmd_density->add_option("--w", density.width, "map width")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_density->add_option("--h", density.height, "map height")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_density->add_option("--knn-k", density.cfg.knn_k, "adaptive-sigma neighbor count")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_density->add_option("--beta", density.cfg.beta, "sigma = beta x mean kNN distance")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_density->add_option("--sigma-min", density.cfg.sigma_min, "sigma clamp lower bound, px")->check(CLI::PositiveNumber)->capture_default_str();
  cmd_density->add_option("--sigma-max", density.cfg.sigma_max, "sigma clamp upper bound, px")->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParse;
  }

  try {
    if (cmd_extract->parsed()) return run_extract_roots(extract);
    if (cmd_grow->parsed()) return run_grow(grow);
    if (cmd_eval->parsed()) return run_evaluate(eval);
    if (cmd_synth->parsed()) return run_synth(synth);
    if (cmd_export->parsed()) return run_export_obj(export_obj);
    if (cmd_density->parsed()) return run_density_from_roots(density);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }
  return kExitOk;
}
