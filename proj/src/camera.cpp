#include "fibrow/camera.hpp"

#include <cmath>

#include "fibrow/errors.hpp"

namespace fibrow {

Vec2 project(const Camera& camera, const Point3& p) {
  const Vec3 pc = camera.to_camera(p);
  if (camera.mode == CameraMode::perspective) {
    if (std::abs(pc.z) <= 1e-9)
      fail(Errc::degenerate_projection,
           "project: perspective point on the camera plane");
    return {camera.fx * pc.x / pc.z + camera.cx,
            camera.fy * pc.y / pc.z + camera.cy};
  }
  return {camera.fx * pc.x + camera.cx, camera.fy * pc.y + camera.cy};
}

Camera look_at(CameraMode mode, const Vec3& position, const Vec3& target,
               const Vec3& up_hint) {
  Vec3 forward = target - position;
  if (forward.norm() < 1e-12)
    fail(Errc::config_invalid, "look_at: position equals target");
  forward = normalized(forward);
  Vec3 up = up_hint;
  if (cross(up, forward).norm() < 1e-9) up = Vec3{1.0, 0.0, 0.0};
  const Vec3 right = normalized(cross(up, forward));
  const Vec3 down = cross(forward, right);  // completes a right-handed frame

  Camera cam;
  cam.mode = mode;
  cam.rot = Mat3::from_rows(right, down, forward);
  cam.trans = -(cam.rot * position);
  return cam;
}

}  // namespace fibrow
