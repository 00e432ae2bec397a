#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "fibrow/formats.hpp"
#include "fibrow/metrics.hpp"
#include "fibrow/synth.hpp"

using namespace fibrow;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
  std::string stderr_text;
};

RunResult run_cli(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt";
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(FIBROW_CLI_PATH) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.stdout_text = read_file_text(out.string());
  result.stderr_text = read_file_text(err.string());
  return result;
}

// Fresh scratch directory per test case.
struct Scratch {
  fs::path dir;
  explicit Scratch(const char* name)
      : dir(fs::temp_directory_path() / "fibrow_cli" / name) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string path(const std::string& name) const {
    return (dir / name).string();
  }
};

std::string synth_flags(const std::string& out_dir, int roots, uint64_t seed) {
  return "synth --out " + out_dir + " --root-count " + std::to_string(roots) +
         " --seed " + std::to_string(seed);
}

}  // namespace

TEST_CASE("cli: synth reruns are byte-identical and respect flags") {
  Scratch scratch("synth_determinism");
  const auto a = run_cli(synth_flags(scratch.path("a"), 18, 5), scratch.dir);
  const auto b = run_cli(synth_flags(scratch.path("b"), 18, 5), scratch.dir);
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  for (const char* name : {"mesh.obj", "hull.obj", "camera.json", "roots.fib",
                           "fibers.fib", "field.ofld", "density.dmap",
                           "levels.txt"}) {
    const auto fa = read_file_bytes(scratch.path("a/") + name);
    const auto fb = read_file_bytes(scratch.path("b/") + name);
    CHECK(fa == fb);
  }
  const FiberSet roots = read_fib(scratch.path("a/roots.fib"));
  CHECK(roots.size() == 18);
}

TEST_CASE("cli: synth rejects an invalid field style with exit 2") {
  Scratch scratch("synth_bad_style");
  const auto r =
      run_cli("synth --out " + scratch.path("case") + " --field-style vortex",
              scratch.dir);
  CHECK(r.exit_code == 2);
  CHECK(r.stderr_text.find("field style") != std::string::npos);
}

TEST_CASE("cli: synth accepts a JSON config file") {
  Scratch scratch("synth_config");
  SynthConfig cfg;
  cfg.root_count = 9;
  cfg.seed = 12;
  cfg.field_res = 24;
  cfg.band_res_u = 24;
  cfg.image_width = 500;
  cfg.image_height = 300;
  cfg.cam_focal_px = 650.0;
  write_file_text(scratch.path("cfg.json"), serialize_synth_config_json(cfg));
  const auto r = run_cli("synth --config " + scratch.path("cfg.json") +
                             " --out " + scratch.path("case"),
                         scratch.dir);
  CHECK(r.exit_code == 0);
  CHECK(read_fib(scratch.path("case/roots.fib")).size() == 9);
}

TEST_CASE("cli: extract-roots recovers the ground-truth count on a separated case") {
  Scratch scratch("extract");
  const auto synth = run_cli(
      synth_flags(scratch.path("case"), 12, 3) + " --min-sep 48", scratch.dir);
  REQUIRE(synth.exit_code == 0);
  const auto r = run_cli(
      "extract-roots --density " + scratch.path("case/density.dmap") +
          " --camera " + scratch.path("case/camera.json") + " --mesh " +
          scratch.path("case/mesh.obj") + " --out " + scratch.path("pred.fib"),
      scratch.dir);
  CHECK(r.exit_code == 0);
  CHECK(r.stderr_text.find("SUMMARY") != std::string::npos);
  const FiberSet pred = read_fib(scratch.path("pred.fib"));
  CHECK(pred.size() == 12);
}

TEST_CASE("cli: extract-roots on an all-zero map exits 3") {
  Scratch scratch("extract_zero");
  REQUIRE(run_cli(synth_flags(scratch.path("case"), 6, 1), scratch.dir).exit_code == 0);
  DensityMap zero(64, 64);
  write_dmap(scratch.path("zero.dmap"), zero);
  const auto r = run_cli(
      "extract-roots --density " + scratch.path("zero.dmap") + " --camera " +
          scratch.path("case/camera.json") + " --mesh " +
          scratch.path("case/mesh.obj") + " --out " + scratch.path("pred.fib"),
      scratch.dir);
  CHECK(r.exit_code == 3);
  CHECK(r.stderr_text.find("no clusters") != std::string::npos);
}

TEST_CASE("cli: missing input file exits 2 and names the path") {
  Scratch scratch("missing");
  const auto r = run_cli(
      "extract-roots --density /nonexistent/x.dmap --camera c.json --mesh "
      "m.obj --out o.fib",
      scratch.dir);
  CHECK(r.exit_code == 2);
  CHECK(r.stderr_text.find("/nonexistent/x.dmap") != std::string::npos);
}

TEST_CASE("cli: grow echoes defaults and is byte-deterministic") {
  Scratch scratch("grow");
  REQUIRE(run_cli(synth_flags(scratch.path("case"), 10, 4), scratch.dir).exit_code == 0);
  const std::string cmd = "grow --roots " + scratch.path("case/roots.fib") +
                          " --field " + scratch.path("case/field.ofld") +
                          " --ender mean-length --out ";
  const auto a = run_cli(cmd + scratch.path("a.fib"), scratch.dir);
  CHECK(a.exit_code == 0);
  // Run header carries the paper defaults.
  CHECK(a.stderr_text.find("step=0.014") != std::string::npos);
  CHECK(a.stderr_text.find("theta=30") != std::string::npos);
  const auto b = run_cli(cmd + scratch.path("b.fib"), scratch.dir);
  CHECK(read_file_bytes(scratch.path("a.fib")) ==
        read_file_bytes(scratch.path("b.fib")));
}

TEST_CASE("cli: grow with a short length table exits 4") {
  Scratch scratch("grow_table");
  REQUIRE(run_cli(synth_flags(scratch.path("case"), 10, 4), scratch.dir).exit_code == 0);
  write_file_text(scratch.path("short.txt"), "3\n4\n");  // 2 entries, 10 roots
  const auto r = run_cli("grow --roots " + scratch.path("case/roots.fib") +
                             " --field " + scratch.path("case/field.ofld") +
                             " --ender table:" + scratch.path("short.txt") +
                             " --out " + scratch.path("out.fib"),
                         scratch.dir);
  CHECK(r.exit_code == 4);
}

TEST_CASE("cli: grow with an unknown ender kind exits 4") {
  Scratch scratch("grow_badender");
  REQUIRE(run_cli(synth_flags(scratch.path("case"), 6, 4), scratch.dir).exit_code == 0);
  const auto r = run_cli("grow --roots " + scratch.path("case/roots.fib") +
                             " --field " + scratch.path("case/field.ofld") +
                             " --ender shrug --out " + scratch.path("out.fib"),
                         scratch.dir);
  CHECK(r.exit_code == 4);
}

TEST_CASE("cli: evaluate of a file against itself is the identity report") {
  Scratch scratch("eval_self");
  REQUIRE(run_cli(synth_flags(scratch.path("case"), 12, 9), scratch.dir).exit_code == 0);
  const auto r = run_cli("evaluate --pred " + scratch.path("case/fibers.fib") +
                             " --gt " + scratch.path("case/fibers.fib") +
                             " --report " + scratch.path("report.json"),
                         scratch.dir);
  CHECK(r.exit_code == 0);
  const std::string report = read_file_text(scratch.path("report.json"));
  CHECK(report.find("\"iou\": 1.0") != std::string::npos);
  CHECK(report.find("\"fdo\": 0.0") != std::string::npos);
  CHECK(report.find("\"mle\": 0.0") != std::string::npos);
  CHECK(report.find("\"nde_002\": 0.0") != std::string::npos);
}

TEST_CASE("cli: evaluate matches the library bit-exactly and swaps cleanly") {
  Scratch scratch("eval_lib");
  REQUIRE(run_cli(synth_flags(scratch.path("case"), 10, 2), scratch.dir).exit_code == 0);
  // Grow a mean-length reconstruction as the prediction.
  REQUIRE(run_cli("grow --roots " + scratch.path("case/roots.fib") +
                      " --field " + scratch.path("case/field.ofld") +
                      " --ender mean-length --out " + scratch.path("pred.fib"),
                  scratch.dir).exit_code == 0);
  REQUIRE(run_cli("evaluate --pred " + scratch.path("pred.fib") + " --gt " +
                      scratch.path("case/fibers.fib") + " --report " +
                      scratch.path("cli.json"),
                  scratch.dir).exit_code == 0);

  const FiberSet pred = read_fib(scratch.path("pred.fib"));
  const FiberSet gt = read_fib(scratch.path("case/fibers.fib"));
  const MetricsReport lib = evaluate(pred, gt);
  CHECK(read_file_text(scratch.path("cli.json")) == serialize_report_json(lib));

  // Swapping pred and gt leaves nde/dcd/fdo unchanged.
  REQUIRE(run_cli("evaluate --pred " + scratch.path("case/fibers.fib") +
                      " --gt " + scratch.path("pred.fib") + " --report " +
                      scratch.path("swapped.json"),
                  scratch.dir).exit_code == 0);
  const MetricsReport swapped = evaluate(gt, pred);
  CHECK(lib.fdo_value == swapped.fdo_value);
  for (size_t i = 0; i < lib.nde_values.size(); ++i) {
    CHECK(lib.nde_values[i] == swapped.nde_values[i]);
    CHECK(lib.dcd_values[i] == swapped.dcd_values[i]);
  }
}

TEST_CASE("cli: evaluate with an empty fiber file exits 5") {
  Scratch scratch("eval_empty");
  REQUIRE(run_cli(synth_flags(scratch.path("case"), 6, 2), scratch.dir).exit_code == 0);
  write_file_text(scratch.path("empty.fib"), "0\n");
  const auto r = run_cli("evaluate --pred " + scratch.path("empty.fib") +
                             " --gt " + scratch.path("case/fibers.fib") +
                             " --report " + scratch.path("r.json"),
                         scratch.dir);
  CHECK(r.exit_code == 5);
}

TEST_CASE("cli: export-obj sweeps tubes that load back") {
  Scratch scratch("export");
  REQUIRE(run_cli(synth_flags(scratch.path("case"), 5, 8), scratch.dir).exit_code == 0);
  const auto r = run_cli("export-obj --fibers " + scratch.path("case/fibers.fib") +
                             " --out " + scratch.path("tubes.obj") + " --sides 6",
                         scratch.dir);
  CHECK(r.exit_code == 0);
  const TriMesh tubes = load_obj(scratch.path("tubes.obj"));
  const FiberSet fibers = read_fib(scratch.path("case/fibers.fib"));
  size_t expected_vertices = 0;
  for (const auto& f : fibers.fibers)
    expected_vertices += 6 * static_cast<size_t>(f.size());
  CHECK(tubes.vertices.size() == expected_vertices);
  CHECK(!tubes.triangles.empty());
}

TEST_CASE("cli: export-obj with only single-point fibers exits 5") {
  Scratch scratch("export_pointy");
  REQUIRE(run_cli(synth_flags(scratch.path("case"), 5, 8), scratch.dir).exit_code == 0);
  const auto r = run_cli("export-obj --fibers " + scratch.path("case/roots.fib") +
                             " --out " + scratch.path("tubes.obj"),
                         scratch.dir);
  CHECK(r.exit_code == 5);
}

TEST_CASE("cli: density-from-roots peaks at the projected root") {
  Scratch scratch("density");
  REQUIRE(run_cli(synth_flags(scratch.path("case"), 1, 6), scratch.dir).exit_code == 0);
  const auto r = run_cli("density-from-roots --roots " +
                             scratch.path("case/roots.fib") + " --camera " +
                             scratch.path("case/camera.json") +
                             " --w 1500 --h 600 --out " + scratch.path("d.dmap"),
                         scratch.dir);
  CHECK(r.exit_code == 0);
  CHECK(r.stderr_text.find("knn_k=3") != std::string::npos);

  const DensityMap map = read_dmap(scratch.path("d.dmap"));
  const FiberSet roots = read_fib(scratch.path("case/roots.fib"));
  const Camera cam = read_camera(scratch.path("case/camera.json"));
  const Vec2 uv = project(cam, roots.fibers[0].points[0]);
  float best = -1;
  int bx = 0, by = 0;
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      if (map.at(x, y) > best) {
        best = map.at(x, y);
        bx = x;
        by = y;
      }
  CHECK(std::abs(bx + 0.5 - uv.x) <= 1.0);
  CHECK(std::abs(by + 0.5 - uv.y) <= 1.0);
}

TEST_CASE("cli: density-from-roots with an empty roots file writes a zero map") {
  Scratch scratch("density_empty");
  REQUIRE(run_cli(synth_flags(scratch.path("case"), 1, 6), scratch.dir).exit_code == 0);
  write_file_text(scratch.path("none.fib"), "0\n");
  const auto r = run_cli("density-from-roots --roots " + scratch.path("none.fib") +
                             " --camera " + scratch.path("case/camera.json") +
                             " --w 100 --h 80 --out " + scratch.path("d.dmap"),
                         scratch.dir);
  CHECK(r.exit_code == 0);
  const DensityMap map = read_dmap(scratch.path("d.dmap"));
  CHECK(map.width == 100);
  CHECK(map.total_mass() == 0.0);
}

TEST_CASE("cli: unknown flag is rejected") {
  Scratch scratch("badflag");
  const auto r = run_cli("grow --bogus 1", scratch.dir);
  CHECK(r.exit_code == 2);
}
