#pragma once

#include "fibrow/geometry.hpp"

namespace fibrow {

enum class CameraMode { perspective, orthographic };

// World -> continuous pixel coordinates. Extrinsics are world-to-camera:
// p_cam = rot * p + trans, with the camera looking along +z_cam. In
// perspective mode fx/fy are focal lengths in pixels and cx/cy the principal
// point; in orthographic mode they act as scale (px per unit) and offset.
struct Camera {
  CameraMode mode = CameraMode::perspective;
  Mat3 rot;
  Vec3 trans;
  double fx = 1.0, fy = 1.0;
  double cx = 0.0, cy = 0.0;
  int width = 0, height = 0;

  Vec3 to_camera(const Point3& p) const { return rot * p + trans; }
  Vec3 center() const { return -(rot.transposed() * trans); }
};

// Throws degenerate_projection when a perspective point sits on the camera
// plane (|z_cam| <= 1e-9).
Vec2 project(const Camera& camera, const Point3& p);

// Positions a camera at `position` aimed at `target`. +x_cam maps to +u.
// Intrinsics are left at defaults; fill them in afterwards.
Camera look_at(CameraMode mode, const Vec3& position, const Vec3& target,
               const Vec3& up_hint = {0.0, 1.0, 0.0});

}  // namespace fibrow
