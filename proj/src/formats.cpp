#include "fibrow/formats.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fibrow/errors.hpp"

namespace fibrow {

namespace {

using json = nlohmann::json;

constexpr uint16_t kFormatVersion = 1;

// Little-endian cursor over a byte buffer.
class ByteReader {
 public:
  explicit ByteReader(const std::vector<uint8_t>& bytes) : bytes_(bytes) {}

  void expect_magic(const char* magic) {
    if (bytes_.size() < pos_ + 4 || std::memcmp(bytes_.data() + pos_, magic, 4) != 0)
      fail(Errc::magic_mismatch,
           std::string("expected magic '") + magic + "' at byte 0");
    pos_ += 4;
  }

  uint16_t u16() { return static_cast<uint16_t>(raw(2)); }
  uint32_t u32() { return static_cast<uint32_t>(raw(4)); }

  float f32() {
    uint32_t bits = u32();
    float out;
    std::memcpy(&out, &bits, 4);
    return out;
  }

  void read_f32_block(float* dst, size_t count) {
    need(count * 4);
    // Byte-wise assembly keeps the format little-endian everywhere.
    for (size_t i = 0; i < count; ++i) {
      uint32_t bits = static_cast<uint32_t>(bytes_[pos_]) |
                      (static_cast<uint32_t>(bytes_[pos_ + 1]) << 8) |
                      (static_cast<uint32_t>(bytes_[pos_ + 2]) << 16) |
                      (static_cast<uint32_t>(bytes_[pos_ + 3]) << 24);
      std::memcpy(dst + i, &bits, 4);
      pos_ += 4;
    }
  }

  size_t position() const { return pos_; }
  bool exhausted() const { return pos_ == bytes_.size(); }

 private:
  uint64_t raw(size_t n) {
    need(n);
    uint64_t v = 0;
    for (size_t i = 0; i < n; ++i)
      v |= static_cast<uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += n;
    return v;
  }

  void need(size_t n) {
    if (bytes_.size() - pos_ < n)
      fail(Errc::truncated_payload,
           "payload truncated at byte " + std::to_string(pos_));
  }

  const std::vector<uint8_t>& bytes_;
  size_t pos_ = 0;
};

class ByteWriter {
 public:
  void magic(const char* m) {
    bytes_.insert(bytes_.end(), m, m + 4);
  }
  void u16(uint16_t v) { raw(v, 2); }
  void u32(uint32_t v) { raw(v, 4); }
  void f32(float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    raw(bits, 4);
  }
  std::vector<uint8_t> take() { return std::move(bytes_); }

 private:
  void raw(uint64_t v, size_t n) {
    for (size_t i = 0; i < n; ++i)
      bytes_.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xFF));
  }
  std::vector<uint8_t> bytes_;
};

void check_version(uint16_t version, const char* what) {
  if (version != kFormatVersion)
    fail(Errc::schema_error, std::string(what) + ": unsupported version " +
                                 std::to_string(version));
}

// Guard against dimension products that overflow the payload computation.
size_t checked_cells(uint64_t a, uint64_t b, uint64_t c, const char* what) {
  if (a == 0 || b == 0 || c == 0 || a > (1u << 20) || b > (1u << 20) ||
      c > (1u << 20) || a * b > (1ull << 32) || a * b * c > (1ull << 32))
    fail(Errc::schema_error, std::string(what) + ": unreasonable dimensions");
  return static_cast<size_t>(a * b * c);
}

}  // namespace

// ---------------------------------------------------------------------------
// DMAP

DensityMap parse_dmap(const std::vector<uint8_t>& bytes) {
  ByteReader r(bytes);
  r.expect_magic("DMAP");
  check_version(r.u16(), "DMAP");
  const uint32_t w = r.u32();
  const uint32_t h = r.u32();
  const size_t cells = checked_cells(w, h, 1, "DMAP");
  DensityMap map(static_cast<int>(w), static_cast<int>(h));
  r.read_f32_block(map.values.data(), cells);
  if (!r.exhausted())
    fail(Errc::count_mismatch,
         "DMAP: trailing bytes after payload at byte " +
             std::to_string(r.position()));
  for (float v : map.values)
    if (!std::isfinite(v) || v < 0.0f)
      fail(Errc::non_finite, "DMAP: non-finite or negative value");
  return map;
}

std::vector<uint8_t> serialize_dmap(const DensityMap& map) {
  ByteWriter w;
  w.magic("DMAP");
  w.u16(kFormatVersion);
  w.u32(static_cast<uint32_t>(map.width));
  w.u32(static_cast<uint32_t>(map.height));
  for (float v : map.values) w.f32(v);
  return w.take();
}

// ---------------------------------------------------------------------------
// OFLD

VoxelGridField parse_ofld(const std::vector<uint8_t>& bytes) {
  ByteReader r(bytes);
  r.expect_magic("OFLD");
  check_version(r.u16(), "OFLD");
  const uint32_t nx = r.u32();
  const uint32_t ny = r.u32();
  const uint32_t nz = r.u32();
  if (nx < 2 || ny < 2 || nz < 2)
    fail(Errc::schema_error, "OFLD: dims must be >= 2 per axis");
  const size_t nodes = checked_cells(nx, ny, nz, "OFLD");
  float bbox[6];
  r.read_f32_block(bbox, 6);
  for (float v : bbox)
    if (!std::isfinite(v)) fail(Errc::non_finite, "OFLD: non-finite bbox");
  const Vec3 bmin{bbox[0], bbox[1], bbox[2]};
  const Vec3 bmax{bbox[3], bbox[4], bbox[5]};
  if (!(bmin.x < bmax.x && bmin.y < bmax.y && bmin.z < bmax.z))
    fail(Errc::schema_error, "OFLD: empty bounding box");
  std::vector<float> data(nodes * 3);
  r.read_f32_block(data.data(), data.size());
  if (!r.exhausted())
    fail(Errc::count_mismatch,
         "OFLD: trailing bytes after payload at byte " +
             std::to_string(r.position()));
  for (float v : data)
    if (!std::isfinite(v)) fail(Errc::non_finite, "OFLD: non-finite vector");
  return VoxelGridField(static_cast<int>(nx), static_cast<int>(ny),
                        static_cast<int>(nz), bmin, bmax, std::move(data));
}

std::vector<uint8_t> serialize_ofld(const VoxelGridField& field) {
  ByteWriter w;
  w.magic("OFLD");
  w.u16(kFormatVersion);
  w.u32(static_cast<uint32_t>(field.nx()));
  w.u32(static_cast<uint32_t>(field.ny()));
  w.u32(static_cast<uint32_t>(field.nz()));
  const Vec3 bmin = field.bbox_min();
  const Vec3 bmax = field.bbox_max();
  for (double v : {bmin.x, bmin.y, bmin.z, bmax.x, bmax.y, bmax.z})
    w.f32(static_cast<float>(v));
  for (float v : field.data()) w.f32(v);
  return w.take();
}

// ---------------------------------------------------------------------------
// FIB text format

namespace {

// Line-oriented tokenizer for the FIB parser; reports 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(const std::string& text) : text_(text) {}

  bool next_line(std::string& out) {
    while (pos_ < text_.size()) {
      size_t end = text_.find('\n', pos_);
      if (end == std::string::npos) end = text_.size();
      std::string line = text_.substr(pos_, end - pos_);
      pos_ = end + 1;
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      // Skip blank lines.
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      out = std::move(line);
      return true;
    }
    return false;
  }

  int line_no() const { return line_no_; }

 private:
  const std::string& text_;
  size_t pos_ = 0;
  int line_no_ = 0;
};

long parse_count(const std::string& line, int line_no, const char* what) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(line.c_str(), &end, 10);
  if (end == line.c_str() || errno != 0 || v < 0 || v > 100000000)
    fail(Errc::count_mismatch, std::string("FIB: bad ") + what + " at line " +
                                   std::to_string(line_no));
  while (*end == ' ' || *end == '\t') ++end;
  if (*end != '\0')
    fail(Errc::count_mismatch, std::string("FIB: trailing junk after ") +
                                   what + " at line " +
                                   std::to_string(line_no));
  return v;
}

}  // namespace

FiberSet parse_fib(const std::string& text) {
  LineReader reader(text);
  std::string line;
  if (!reader.next_line(line))
    fail(Errc::truncated_payload, "FIB: empty input");
  const long fiber_count = parse_count(line, reader.line_no(), "fiber count");

  FiberSet fs;
  fs.fibers.reserve(static_cast<size_t>(fiber_count));
  for (long i = 0; i < fiber_count; ++i) {
    if (!reader.next_line(line))
      fail(Errc::count_mismatch,
           "FIB: declared " + std::to_string(fiber_count) +
               " fibers but input ends after " + std::to_string(i) +
               " (line " + std::to_string(reader.line_no()) + ")");
    const long point_count = parse_count(line, reader.line_no(), "point count");
    if (point_count < 1)
      fail(Errc::count_mismatch, "FIB: fiber with zero points at line " +
                                     std::to_string(reader.line_no()));
    Fiber fiber;
    fiber.points.reserve(static_cast<size_t>(point_count));
    for (long j = 0; j < point_count; ++j) {
      if (!reader.next_line(line))
        fail(Errc::count_mismatch,
             "FIB: fiber " + std::to_string(i) + " declares " +
                 std::to_string(point_count) + " points but input ends at line " +
                 std::to_string(reader.line_no()));
      Point3 p;
      char extra = 0;
      const int got =
          std::sscanf(line.c_str(), "%lf %lf %lf %c", &p.x, &p.y, &p.z, &extra);
      if (got != 3)
        fail(Errc::schema_error, "FIB: expected 'x y z' at line " +
                                     std::to_string(reader.line_no()));
      if (!is_finite(p))
        fail(Errc::non_finite, "FIB: non-finite coordinate at line " +
                                   std::to_string(reader.line_no()));
      fiber.points.push_back(p);
    }
    fs.fibers.push_back(std::move(fiber));
  }
  if (reader.next_line(line))
    fail(Errc::count_mismatch, "FIB: unexpected extra content at line " +
                                   std::to_string(reader.line_no()));
  return fs;
}

std::string serialize_fib(const FiberSet& fs) {
  std::string out;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%d\n", fs.size());
  out += buf;
  for (const auto& f : fs.fibers) {
    std::snprintf(buf, sizeof(buf), "%d\n", f.size());
    out += buf;
    for (const auto& p : f.points) {
      std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", p.x, p.y, p.z);
      out += buf;
    }
  }
  return out;
}

FiberSet roots_to_fiberset(const RootSet& roots) {
  FiberSet fs;
  fs.fibers.reserve(roots.roots.size());
  for (const auto& r : roots.roots) fs.fibers.push_back(Fiber{{r}});
  return fs;
}

RootSet fiberset_to_roots(const FiberSet& fs) {
  RootSet roots;
  roots.roots.reserve(fs.fibers.size());
  for (const auto& f : fs.fibers) roots.roots.push_back(f.root());
  return roots;
}

// ---------------------------------------------------------------------------
// Camera JSON

Camera parse_camera_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(Errc::schema_error, std::string("camera: invalid JSON: ") + e.what());
  }
  try {
    Camera cam;
    const std::string mode = doc.at("mode").get<std::string>();
    if (mode == "perspective")
      cam.mode = CameraMode::perspective;
    else if (mode == "orthographic")
      cam.mode = CameraMode::orthographic;
    else
      fail(Errc::schema_error, "camera: unknown mode '" + mode + "'");

    const auto& ext = doc.at("extrinsics");
    if (!ext.is_array() || ext.size() != 3)
      fail(Errc::schema_error, "camera: extrinsics must be 3 rows");
    for (int r = 0; r < 3; ++r) {
      const auto& row = ext.at(static_cast<size_t>(r));
      if (!row.is_array() || row.size() != 4)
        fail(Errc::schema_error, "camera: extrinsics rows must have 4 entries");
      for (int c = 0; c < 3; ++c)
        cam.rot.m[static_cast<size_t>(3 * r + c)] =
            row.at(static_cast<size_t>(c)).get<double>();
      const double t = row.at(3).get<double>();
      (r == 0 ? cam.trans.x : r == 1 ? cam.trans.y : cam.trans.z) = t;
    }

    const auto& intr = doc.at("intrinsics");
    if (cam.mode == CameraMode::perspective) {
      cam.fx = intr.at("fx").get<double>();
      cam.fy = intr.at("fy").get<double>();
      cam.cx = intr.at("cx").get<double>();
      cam.cy = intr.at("cy").get<double>();
      if (cam.fx <= 0.0 || cam.fy <= 0.0)
        fail(Errc::schema_error, "camera: focal lengths must be > 0");
    } else {
      cam.fx = intr.at("sx").get<double>();
      cam.fy = intr.at("sy").get<double>();
      cam.cx = intr.at("ox").get<double>();
      cam.cy = intr.at("oy").get<double>();
    }

    cam.width = doc.at("width").get<int>();
    cam.height = doc.at("height").get<int>();
    if (cam.width <= 0 || cam.height <= 0)
      fail(Errc::schema_error, "camera: width and height must be > 0");

    for (double v : cam.rot.m)
      if (!std::isfinite(v)) fail(Errc::non_finite, "camera: non-finite rotation");
    if (!is_finite(cam.trans) || !std::isfinite(cam.fx) ||
        !std::isfinite(cam.fy) || !std::isfinite(cam.cx) ||
        !std::isfinite(cam.cy))
      fail(Errc::non_finite, "camera: non-finite parameter");
    return cam;
  } catch (const json::exception& e) {
    fail(Errc::schema_error, std::string("camera: schema error: ") + e.what());
  }
}

std::string serialize_camera_json(const Camera& camera) {
  json doc;
  doc["mode"] = camera.mode == CameraMode::perspective ? "perspective"
                                                       : "orthographic";
  json ext = json::array();
  const double* m = camera.rot.m.data();
  const double t[3] = {camera.trans.x, camera.trans.y, camera.trans.z};
  for (int r = 0; r < 3; ++r)
    ext.push_back({m[3 * r], m[3 * r + 1], m[3 * r + 2], t[r]});
  doc["extrinsics"] = ext;
  if (camera.mode == CameraMode::perspective)
    doc["intrinsics"] = {{"fx", camera.fx}, {"fy", camera.fy},
                         {"cx", camera.cx}, {"cy", camera.cy}};
  else
    doc["intrinsics"] = {{"sx", camera.fx}, {"sy", camera.fy},
                         {"ox", camera.cx}, {"oy", camera.cy}};
  doc["width"] = camera.width;
  doc["height"] = camera.height;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// OBJ subset

TriMesh parse_obj(const std::string& text, ObjLoadStats* stats) {
  TriMesh mesh;
  std::vector<std::array<int, 3>> raw_tris;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;  // blank
    if (tag == "#" || tag[0] == '#') continue;
    if (tag == "vn" || tag == "vt" || tag == "s" || tag == "o" || tag == "g" ||
        tag == "mtllib" || tag == "usemtl")
      continue;  // tolerated, ignored
    if (tag == "v") {
      Point3 p;
      if (!(ls >> p.x >> p.y >> p.z))
        fail(Errc::schema_error,
             "OBJ: bad vertex at line " + std::to_string(line_no));
      if (!is_finite(p))
        fail(Errc::non_finite,
             "OBJ: non-finite vertex at line " + std::to_string(line_no));
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) {
        // "i", "i/j", "i//k", "i/j/k" all start with the vertex index.
        errno = 0;
        char* end = nullptr;
        const long v = std::strtol(tok.c_str(), &end, 10);
        if (end == tok.c_str() || errno != 0)
          fail(Errc::schema_error,
               "OBJ: bad face index at line " + std::to_string(line_no));
        if (v < 1 || v > static_cast<long>(mesh.vertices.size()))
          fail(Errc::index_out_of_range,
               "OBJ: face index " + std::to_string(v) +
                   " out of range at line " + std::to_string(line_no));
        idx.push_back(static_cast<int>(v - 1));
      }
      if (idx.size() < 3)
        fail(Errc::schema_error,
             "OBJ: face with fewer than 3 vertices at line " +
                 std::to_string(line_no));
      // Fan triangulation anchored at the first face vertex.
      for (size_t i = 1; i + 1 < idx.size(); ++i)
        raw_tris.push_back({idx[0], idx[i], idx[i + 1]});
    } else {
      fail(Errc::unsupported_directive,
           "OBJ: unsupported directive '" + tag + "' at line " +
               std::to_string(line_no));
    }
  }

  int dropped = 0;
  for (const auto& tri : raw_tris) {
    if (triangle_area(mesh.vertices[static_cast<size_t>(tri[0])],
                      mesh.vertices[static_cast<size_t>(tri[1])],
                      mesh.vertices[static_cast<size_t>(tri[2])]) <= 0.0) {
      ++dropped;
      continue;
    }
    mesh.triangles.push_back(tri);
  }
  if (stats) stats->dropped_degenerate = dropped;
  return mesh;
}

TriMesh load_obj(const std::string& path, ObjLoadStats* stats) {
  TriMesh mesh = parse_obj(read_file_text(path), stats);
  const std::string mask_path = path + ".mask";
  if (std::filesystem::exists(mask_path)) {
    std::istringstream in(read_file_text(mask_path));
    std::string line;
    std::vector<uint8_t> mask;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      if (line != "0" && line != "1" && line != "0\r" && line != "1\r")
        fail(Errc::schema_error, "mask: expected 0 or 1 at line " +
                                     std::to_string(line_no));
      mask.push_back(line[0] == '1');
    }
    if (mask.size() != mesh.vertices.size())
      fail(Errc::count_mismatch,
           "mask: " + std::to_string(mask.size()) + " entries for " +
               std::to_string(mesh.vertices.size()) + " vertices");
    mesh.mask = std::move(mask);
  }
  return mesh;
}

std::string serialize_obj(const TriMesh& mesh) {
  std::string out;
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
    out += buf;
  }
  for (const auto& t : mesh.triangles) {
    std::snprintf(buf, sizeof(buf), "f %d %d %d\n", t[0] + 1, t[1] + 1,
                  t[2] + 1);
    out += buf;
  }
  return out;
}

void save_obj(const std::string& path, const TriMesh& mesh, bool write_mask) {
  write_file_text(path, serialize_obj(mesh));
  if (write_mask && !mesh.mask.empty()) {
    std::string out;
    for (uint8_t m : mesh.mask) out += m ? "1\n" : "0\n";
    write_file_text(path + ".mask", out);
  }
}

// ---------------------------------------------------------------------------
// Levels

std::vector<int> parse_levels(const std::string& text) {
  std::vector<int> levels;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(line.c_str(), &end, 10);
    if (end == line.c_str() || errno != 0 || *end != '\0' || v < 0 ||
        v > 1000000)
      fail(Errc::schema_error,
           "levels: bad entry at line " + std::to_string(line_no));
    levels.push_back(static_cast<int>(v));
  }
  return levels;
}

std::string serialize_levels(const std::vector<int>& levels) {
  std::string out;
  for (int v : levels) out += std::to_string(v) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Metric reports

namespace {

std::string phi_suffix(double phi) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d", static_cast<int>(std::lround(phi * 100.0)));
  return buf;
}

}  // namespace

std::string serialize_report_json(const MetricsReport& report) {
  json doc;
  for (size_t i = 0; i < report.phis.size(); ++i) {
    doc["nde_" + phi_suffix(report.phis[i])] = report.nde_values[i];
    doc["dcd_" + phi_suffix(report.phis[i])] = report.dcd_values[i];
  }
  doc["mle"] = report.mle_value;
  doc["fdo"] = report.fdo_value;
  doc["iou"] = report.iou_value;
  doc["params"] = {{"phi", report.phis},
                   {"fdo_n", report.params.fdo_n},
                   {"radius", report.params.radius},
                   {"grid_res", report.params.grid_res},
                   {"step", report.params.step},
                   {"mle_pairing", report.mle_pairing}};
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// File wrappers

std::vector<uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_failure, "cannot open '" + path + "'");
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

std::string read_file_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_failure, "cannot open '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

void write_file_bytes(const std::string& path,
                      const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_failure, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(Errc::io_failure, "failed writing '" + path + "'");
}

void write_file_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_failure, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) fail(Errc::io_failure, "failed writing '" + path + "'");
}

DensityMap read_dmap(const std::string& path) {
  return parse_dmap(read_file_bytes(path));
}
void write_dmap(const std::string& path, const DensityMap& map) {
  write_file_bytes(path, serialize_dmap(map));
}

VoxelGridField read_ofld(const std::string& path) {
  return parse_ofld(read_file_bytes(path));
}
void write_ofld(const std::string& path, const VoxelGridField& field) {
  write_file_bytes(path, serialize_ofld(field));
}

FiberSet read_fib(const std::string& path) {
  return parse_fib(read_file_text(path));
}
void write_fib(const std::string& path, const FiberSet& fs) {
  write_file_text(path, serialize_fib(fs));
}

Camera read_camera(const std::string& path) {
  return parse_camera_json(read_file_text(path));
}
void write_camera(const std::string& path, const Camera& camera) {
  write_file_text(path, serialize_camera_json(camera));
}

std::vector<int> read_levels(const std::string& path) {
  return parse_levels(read_file_text(path));
}
void write_levels(const std::string& path, const std::vector<int>& levels) {
  write_file_text(path, serialize_levels(levels));
}

void write_report(const std::string& path, const MetricsReport& report) {
  write_file_text(path, serialize_report_json(report));
}

}  // namespace fibrow
