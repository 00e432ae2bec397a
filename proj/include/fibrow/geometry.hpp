#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace fibrow {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }
inline double distance2(const Vec2& a, const Vec2& b) {
  return (a - b).norm2();
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  bool operator==(const Vec3& o) const {
    return x == o.x && y == o.y && z == o.z;
  }

  double norm2() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
};

// Points live in head-normalized units (face width spans [-1, 1]); unit
// vectors carry growth directions. Same layout, different roles.
using Point3 = Vec3;
using UnitVec3 = Vec3;
using Root2D = Vec2;

inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z,
          a.x * b.y - a.y * b.x};
}

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }
inline double distance2(const Vec3& a, const Vec3& b) {
  return (a - b).norm2();
}

inline Vec3 normalized(const Vec3& v) {
  double n = v.norm();
  return {v.x / n, v.y / n, v.z / n};
}

// Zero-length input falls back instead of dividing by zero.
inline Vec3 normalized_or(const Vec3& v, const Vec3& fallback) {
  double n = v.norm();
  if (n < 1e-300) return fallback;
  return {v.x / n, v.y / n, v.z / n};
}

inline bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

inline bool is_unit(const Vec3& v, double tol = 1e-6) {
  return std::abs(v.norm() - 1.0) <= tol;
}

inline double angle_between(const Vec3& a, const Vec3& b) {
  double c = dot(a, b) / (a.norm() * b.norm());
  c = std::max(-1.0, std::min(1.0, c));
  return std::acos(c);
}

// Row-major 3x3 matrix; enough for camera rotations.
struct Mat3 {
  std::array<double, 9> m = {1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return Mat3{}; }

  static Mat3 from_rows(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
    return Mat3{{r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z}};
  }

  Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }

  Mat3 transposed() const {
    return Mat3{{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
  }

  Vec3 row(int i) const { return {m[3 * i], m[3 * i + 1], m[3 * i + 2]}; }
};

struct Box3 {
  Vec3 min{std::numeric_limits<double>::max(),
           std::numeric_limits<double>::max(),
           std::numeric_limits<double>::max()};
  Vec3 max{std::numeric_limits<double>::lowest(),
           std::numeric_limits<double>::lowest(),
           std::numeric_limits<double>::lowest()};

  bool valid() const { return min.x <= max.x && min.y <= max.y && min.z <= max.z; }

  void grow(const Vec3& p) {
    min.x = std::min(min.x, p.x);
    min.y = std::min(min.y, p.y);
    min.z = std::min(min.z, p.z);
    max.x = std::max(max.x, p.x);
    max.y = std::max(max.y, p.y);
    max.z = std::max(max.z, p.z);
  }

  void grow(const Box3& b) {
    grow(b.min);
    grow(b.max);
  }

  Box3 expanded(double pad) const {
    return {min - Vec3{pad, pad, pad}, max + Vec3{pad, pad, pad}};
  }

  bool contains(const Vec3& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y &&
           p.z >= min.z && p.z <= max.z;
  }

  Vec3 center() const { return (min + max) * 0.5; }
};

// NeRF-style positional encoding. Layout: [x, y, z] followed by one block per
// octave k = 0..num_frequencies-1 of sin/cos pairs for each axis:
//   sin(2^k pi x), cos(2^k pi x), sin(2^k pi y), ..., cos(2^k pi z).
// Output length is always 3 + 6 * num_frequencies.
std::vector<double> positional_encoding(const Point3& p, int num_frequencies);

}  // namespace fibrow
