#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fibrow/camera.hpp"
#include "fibrow/density.hpp"
#include "fibrow/fiber.hpp"
#include "fibrow/field.hpp"
#include "fibrow/mesh.hpp"
#include "fibrow/metrics.hpp"

// File formats (byte-exact layouts in docs/formats.md):
//   DMAP  binary density map        magic "DMAP", version 1, f32 LE grid
//   OFLD  binary orientation field  magic "OFLD", version 1, f32 LE vectors
//   FIB   text fiber/root sets      counts + "x y z" lines, 9 sig. digits
//   camera JSON                     mode/extrinsics/intrinsics/size
//   OBJ   v/f subset                triangles; quads fan-triangulated
// Parsers take in-memory buffers so they can be fuzzed; the read_* wrappers
// load a file and parse. Errors carry a byte offset or line number.

namespace fibrow {

// ---- density maps ----
DensityMap parse_dmap(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> serialize_dmap(const DensityMap& map);
DensityMap read_dmap(const std::string& path);
void write_dmap(const std::string& path, const DensityMap& map);

// ---- orientation fields ----
VoxelGridField parse_ofld(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> serialize_ofld(const VoxelGridField& field);
VoxelGridField read_ofld(const std::string& path);
void write_ofld(const std::string& path, const VoxelGridField& field);

// ---- fibers and roots ----
FiberSet parse_fib(const std::string& text);
std::string serialize_fib(const FiberSet& fs);
FiberSet read_fib(const std::string& path);
void write_fib(const std::string& path, const FiberSet& fs);

// Roots travel as single-point fibers in the FIB format.
FiberSet roots_to_fiberset(const RootSet& roots);
RootSet fiberset_to_roots(const FiberSet& fs);

// ---- cameras ----
Camera parse_camera_json(const std::string& text);
std::string serialize_camera_json(const Camera& camera);
Camera read_camera(const std::string& path);
void write_camera(const std::string& path, const Camera& camera);

// ---- meshes (OBJ subset: v/f, plus tolerated vn/vt/comments) ----
struct ObjLoadStats {
  int dropped_degenerate = 0;
};
TriMesh parse_obj(const std::string& text, ObjLoadStats* stats = nullptr);
// Loads path; if "<path>.mask" exists it supplies per-vertex 0/1 lines.
TriMesh load_obj(const std::string& path, ObjLoadStats* stats = nullptr);
std::string serialize_obj(const TriMesh& mesh);
void save_obj(const std::string& path, const TriMesh& mesh,
              bool write_mask = false);

// ---- length levels (one integer per line) ----
std::vector<int> parse_levels(const std::string& text);
std::string serialize_levels(const std::vector<int>& levels);
std::vector<int> read_levels(const std::string& path);
void write_levels(const std::string& path, const std::vector<int>& levels);

// ---- metric reports ----
std::string serialize_report_json(const MetricsReport& report);
void write_report(const std::string& path, const MetricsReport& report);

// ---- shared file helpers ----
std::vector<uint8_t> read_file_bytes(const std::string& path);
std::string read_file_text(const std::string& path);
void write_file_bytes(const std::string& path,
                      const std::vector<uint8_t>& bytes);
void write_file_text(const std::string& path, const std::string& text);

}  // namespace fibrow
