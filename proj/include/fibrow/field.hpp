#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "fibrow/geometry.hpp"

namespace fibrow {

// 3D orientation function: maps a query point to a unit growing direction.
// try_query returns nullopt outside the field's domain; callers decide
// whether that stops growth or is an error.
class OrientationField {
 public:
  virtual ~OrientationField() = default;
  virtual bool contains(const Point3& p) const = 0;
  virtual std::optional<UnitVec3> try_query(const Point3& p) const = 0;
};

// Strict variant: throws out_of_domain instead of returning nullopt.
UnitVec3 query_field(const OrientationField& field, const Point3& p);

class ConstantField final : public OrientationField {
 public:
  explicit ConstantField(const Vec3& direction);
  bool contains(const Point3&) const override { return true; }
  std::optional<UnitVec3> try_query(const Point3& p) const override;

 private:
  UnitVec3 dir_;
};

// Directions tangent to circles around `axis` through `center`; a nonzero
// pitch adds an axial component (swirl/helix). Degenerate on the axis, so a
// small cylinder around it is outside the domain.
class ArcField final : public OrientationField {
 public:
  ArcField(const Vec3& center, const Vec3& axis, double pitch = 0.0,
           double min_radius = 1e-9);
  bool contains(const Point3& p) const override;
  std::optional<UnitVec3> try_query(const Point3& p) const override;

  const Vec3& center() const { return center_; }
  const Vec3& axis() const { return axis_; }
  double pitch() const { return pitch_; }

 private:
  Vec3 center_;
  UnitVec3 axis_;
  double pitch_;
  double min_radius_;
};

// Vector samples on a regular grid of nodes spanning an axis-aligned box,
// x-fastest storage, one float triple per node. Queries interpolate
// trilinearly and renormalize; an interpolated zero falls back to the
// nearest node's vector. Stored vectors need not be unit length.
class VoxelGridField final : public OrientationField {
 public:
  VoxelGridField(int nx, int ny, int nz, const Vec3& bbox_min,
                 const Vec3& bbox_max, std::vector<float> data);

  bool contains(const Point3& p) const override;
  std::optional<UnitVec3> try_query(const Point3& p) const override;

  // Sample an arbitrary field onto a grid over `box`.
  static VoxelGridField sample(const OrientationField& src, const Box3& box,
                               int nx, int ny, int nz);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  const Vec3& bbox_min() const { return bmin_; }
  const Vec3& bbox_max() const { return bmax_; }
  const std::vector<float>& data() const { return data_; }

  Vec3 node_vector(int i, int j, int k) const;

 private:
  int nx_, ny_, nz_;
  Vec3 bmin_, bmax_;
  std::vector<float> data_;  // 3 floats per node, x-fastest
};

}  // namespace fibrow
