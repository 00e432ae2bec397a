#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fibrow/fiber.hpp"
#include "fibrow/field.hpp"
#include "fibrow/mesh.hpp"

namespace fibrow {

struct GrowthConfig {
  double step = 0.014;       // fixed growing step in head units
  double theta_deg = 30.0;   // direction-smoothing threshold
  int max_steps = 200;       // hard safety cap on growth steps per fiber
};

// Binary stop/continue decision over the fiber prefix grown so far. The
// root index identifies the fiber for per-root policies.
class EndingPolicy {
 public:
  virtual ~EndingPolicy() = default;
  virtual bool should_stop(const Fiber& prefix, int root_index) const = 0;
};

// Stop once the prefix arc length reaches target_len.
class MeanLengthEnder final : public EndingPolicy {
 public:
  explicit MeanLengthEnder(double target_len);
  bool should_stop(const Fiber& prefix, int root_index) const override;

 private:
  double target_len_;
};

// Stop when the prefix tip leaves a closed mesh. Throws not_watertight on
// construction if the mesh is open.
class MeshCutEnder final : public EndingPolicy {
 public:
  explicit MeshCutEnder(TriMesh mesh);
  bool should_stop(const Fiber& prefix, int root_index) const override;

 private:
  TriMesh mesh_;
};

// Stop after n growth steps (prefix of n + 1 points).
class MaxStepsEnder final : public EndingPolicy {
 public:
  explicit MaxStepsEnder(int n);
  bool should_stop(const Fiber& prefix, int root_index) const override;

 private:
  int n_;
};

// Per-root target step counts; fiber i stops at table[i] + 1 points.
class LengthTableEnder final : public EndingPolicy {
 public:
  explicit LengthTableEnder(std::vector<int> table);
  bool should_stop(const Fiber& prefix, int root_index) const override;
  int size() const { return static_cast<int>(table_.size()); }

 private:
  std::vector<int> table_;
};

std::unique_ptr<EndingPolicy> mean_length_ender(double target_len = 0.0714);
std::unique_ptr<EndingPolicy> mesh_cut_ender(TriMesh mesh);
std::unique_ptr<EndingPolicy> max_steps_ender(int n);
std::unique_ptr<EndingPolicy> length_table_ender(std::vector<int> table);

// Direction smoothing: when the angle between the previous and current
// directions exceeds theta, take the normalized mean (the angle bisector).
// Near-antiparallel inputs (angle >= 179.9 deg) return prev, where the mean
// degenerates.
UnitVec3 smooth_direction(const UnitVec3& prev, const UnitVec3& cur,
                          double theta_deg);

// Grow one fiber from `root` through the orientation field: query the field
// at the tip, smooth against the previous direction, ask the ender about the
// prefix grown so far, and append tip + step * d while it says continue.
// Leaving the field domain or hitting max_steps also stops. Throws
// root_out_of_domain when the root itself is outside the field.
Fiber grow_fiber(const Point3& root, const OrientationField& field,
                 const EndingPolicy& ender, const GrowthConfig& cfg,
                 int root_index = 0);

struct GrowFailure {
  int root_index = 0;
  std::string message;
};

// grow_all output: fibers for the roots that grew, in root order, plus any
// per-root failures. The call only throws when no root grows at all.
struct GrowReport {
  FiberSet fibers;
  std::vector<GrowFailure> failures;
};

GrowReport grow_all(const RootSet& roots, const OrientationField& field,
                    const EndingPolicy& ender, const GrowthConfig& cfg,
                    int threads = 1);

}  // namespace fibrow
