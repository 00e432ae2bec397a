#include "fibrow/field.hpp"

#include <cmath>

#include "fibrow/errors.hpp"

namespace fibrow {

UnitVec3 query_field(const OrientationField& field, const Point3& p) {
  auto d = field.try_query(p);
  if (!d) fail(Errc::out_of_domain, "query_field: point outside field domain");
  return *d;
}

ConstantField::ConstantField(const Vec3& direction)
    : dir_(normalized(direction)) {
  if (direction.norm() < 1e-12)
    fail(Errc::config_invalid, "ConstantField: zero direction");
}

std::optional<UnitVec3> ConstantField::try_query(const Point3&) const {
  return dir_;
}

ArcField::ArcField(const Vec3& center, const Vec3& axis, double pitch,
                   double min_radius)
    : center_(center),
      axis_(normalized(axis)),
      pitch_(pitch),
      min_radius_(min_radius) {
  if (axis.norm() < 1e-12) fail(Errc::config_invalid, "ArcField: zero axis");
}

bool ArcField::contains(const Point3& p) const {
  const Vec3 rel = p - center_;
  const Vec3 radial = rel - axis_ * dot(rel, axis_);
  return radial.norm() > min_radius_;
}

std::optional<UnitVec3> ArcField::try_query(const Point3& p) const {
  if (!contains(p)) return std::nullopt;
  const Vec3 tangent = cross(axis_, p - center_);
  return normalized(tangent + axis_ * (tangent.norm() * pitch_));
}

VoxelGridField::VoxelGridField(int nx, int ny, int nz, const Vec3& bbox_min,
                               const Vec3& bbox_max, std::vector<float> data)
    : nx_(nx), ny_(ny), nz_(nz), bmin_(bbox_min), bmax_(bbox_max),
      data_(std::move(data)) {
  if (nx_ < 2 || ny_ < 2 || nz_ < 2)
    fail(Errc::config_invalid, "VoxelGridField: dims must be >= 2 per axis");
  if (data_.size() != static_cast<size_t>(nx_) * ny_ * nz_ * 3)
    fail(Errc::count_mismatch, "VoxelGridField: data size mismatch");
  if (!(bmin_.x < bmax_.x && bmin_.y < bmax_.y && bmin_.z < bmax_.z))
    fail(Errc::config_invalid, "VoxelGridField: empty bounding box");
}

Vec3 VoxelGridField::node_vector(int i, int j, int k) const {
  const size_t base =
      3 * (static_cast<size_t>(k) * ny_ * nx_ + static_cast<size_t>(j) * nx_ +
           static_cast<size_t>(i));
  return {data_[base], data_[base + 1], data_[base + 2]};
}

bool VoxelGridField::contains(const Point3& p) const {
  return p.x >= bmin_.x && p.x <= bmax_.x && p.y >= bmin_.y &&
         p.y <= bmax_.y && p.z >= bmin_.z && p.z <= bmax_.z;
}

std::optional<UnitVec3> VoxelGridField::try_query(const Point3& p) const {
  if (!contains(p)) return std::nullopt;
  const double gx = (p.x - bmin_.x) / (bmax_.x - bmin_.x) * (nx_ - 1);
  const double gy = (p.y - bmin_.y) / (bmax_.y - bmin_.y) * (ny_ - 1);
  const double gz = (p.z - bmin_.z) / (bmax_.z - bmin_.z) * (nz_ - 1);
  const int i0 = std::min(static_cast<int>(gx), nx_ - 2);
  const int j0 = std::min(static_cast<int>(gy), ny_ - 2);
  const int k0 = std::min(static_cast<int>(gz), nz_ - 2);
  const double fx = gx - i0;
  const double fy = gy - j0;
  const double fz = gz - k0;

  Vec3 acc{0, 0, 0};
  for (int dk = 0; dk < 2; ++dk)
    for (int dj = 0; dj < 2; ++dj)
      for (int di = 0; di < 2; ++di) {
        const double w = (di ? fx : 1.0 - fx) * (dj ? fy : 1.0 - fy) *
                         (dk ? fz : 1.0 - fz);
        if (w == 0.0) continue;
        acc = acc + node_vector(i0 + di, j0 + dj, k0 + dk) * w;
      }

  if (acc.norm() < 1e-12) {
    // Interpolated vectors canceled; fall back to the nearest node.
    const int i = std::min(static_cast<int>(std::lround(gx)), nx_ - 1);
    const int j = std::min(static_cast<int>(std::lround(gy)), ny_ - 1);
    const int k = std::min(static_cast<int>(std::lround(gz)), nz_ - 1);
    const Vec3 nearest = node_vector(i, j, k);
    if (nearest.norm() < 1e-12) return std::nullopt;  // hole in the field
    return normalized(nearest);
  }
  return normalized(acc);
}

VoxelGridField VoxelGridField::sample(const OrientationField& src,
                                      const Box3& box, int nx, int ny,
                                      int nz) {
  std::vector<float> data;
  data.reserve(static_cast<size_t>(nx) * ny * nz * 3);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const Point3 p{
            box.min.x + (box.max.x - box.min.x) * i / (nx - 1),
            box.min.y + (box.max.y - box.min.y) * j / (ny - 1),
            box.min.z + (box.max.z - box.min.z) * k / (nz - 1)};
        const auto d = src.try_query(p);
        const Vec3 v = d ? *d : Vec3{0, 0, 0};
        data.push_back(static_cast<float>(v.x));
        data.push_back(static_cast<float>(v.y));
        data.push_back(static_cast<float>(v.z));
      }
  return VoxelGridField(nx, ny, nz, box.min, box.max, std::move(data));
}

}  // namespace fibrow
