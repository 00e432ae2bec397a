#include "fibrow/growth.hpp"

#include <cmath>
#include <thread>

#include "fibrow/errors.hpp"

namespace fibrow {

MeanLengthEnder::MeanLengthEnder(double target_len) : target_len_(target_len) {
  if (target_len <= 0.0)
    fail(Errc::config_invalid, "mean_length_ender: target_len must be > 0");
}

bool MeanLengthEnder::should_stop(const Fiber& prefix, int) const {
  return arc_length(prefix) >= target_len_;
}

MeshCutEnder::MeshCutEnder(TriMesh mesh) : mesh_(std::move(mesh)) {
  if (!is_watertight(mesh_))
    fail(Errc::not_watertight, "mesh_cut_ender: mesh is not watertight");
}

bool MeshCutEnder::should_stop(const Fiber& prefix, int) const {
  return !point_in_mesh(mesh_, prefix.tip());
}

MaxStepsEnder::MaxStepsEnder(int n) : n_(n) {
  if (n < 0) fail(Errc::config_invalid, "max_steps_ender: n must be >= 0");
}

bool MaxStepsEnder::should_stop(const Fiber& prefix, int) const {
  return prefix.size() >= n_ + 1;
}

LengthTableEnder::LengthTableEnder(std::vector<int> table)
    : table_(std::move(table)) {
  for (int v : table_)
    if (v < 0)
      fail(Errc::config_invalid, "length_table_ender: negative step count");
}

bool LengthTableEnder::should_stop(const Fiber& prefix, int root_index) const {
  if (root_index < 0 || root_index >= static_cast<int>(table_.size()))
    fail(Errc::missing_root,
         "length_table_ender: no entry for root " + std::to_string(root_index));
  return prefix.size() >= table_[static_cast<size_t>(root_index)] + 1;
}

std::unique_ptr<EndingPolicy> mean_length_ender(double target_len) {
  return std::make_unique<MeanLengthEnder>(target_len);
}
std::unique_ptr<EndingPolicy> mesh_cut_ender(TriMesh mesh) {
  return std::make_unique<MeshCutEnder>(std::move(mesh));
}
std::unique_ptr<EndingPolicy> max_steps_ender(int n) {
  return std::make_unique<MaxStepsEnder>(n);
}
std::unique_ptr<EndingPolicy> length_table_ender(std::vector<int> table) {
  return std::make_unique<LengthTableEnder>(std::move(table));
}

UnitVec3 smooth_direction(const UnitVec3& prev, const UnitVec3& cur,
                          double theta_deg) {
  const double angle = angle_between(prev, cur);
  if (angle >= deg_to_rad(179.9)) return prev;
  if (angle <= deg_to_rad(theta_deg)) return cur;
  return normalized(prev + cur);
}

Fiber grow_fiber(const Point3& root, const OrientationField& field,
                 const EndingPolicy& ender, const GrowthConfig& cfg,
                 int root_index) {
  if (cfg.step <= 0.0 || cfg.theta_deg <= 0.0 || cfg.theta_deg >= 180.0 ||
      cfg.max_steps < 1)
    fail(Errc::config_invalid, "grow_fiber: bad growth config");
  if (!field.contains(root))
    fail(Errc::root_out_of_domain, "grow_fiber: root outside field domain");

  Fiber fiber;
  fiber.points.push_back(root);
  bool have_prev = false;
  UnitVec3 prev_dir{};
  while (fiber.size() <= cfg.max_steps) {
    const auto raw = field.try_query(fiber.tip());
    if (!raw) break;  // grew out of the field volume
    const UnitVec3 dir =
        have_prev ? smooth_direction(prev_dir, *raw, cfg.theta_deg) : *raw;
    if (ender.should_stop(fiber, root_index)) break;
    fiber.points.push_back(fiber.tip() + dir * cfg.step);
    prev_dir = dir;
    have_prev = true;
  }
  return fiber;
}

GrowReport grow_all(const RootSet& roots, const OrientationField& field,
                    const EndingPolicy& ender, const GrowthConfig& cfg,
                    int threads) {
  if (roots.empty()) fail(Errc::empty_roots, "grow_all: no roots");
  const int n = roots.size();
  if (threads < 1) threads = 1;

  std::vector<Fiber> grown(static_cast<size_t>(n));
  std::vector<std::string> errors(static_cast<size_t>(n));

  const auto work = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      try {
        grown[static_cast<size_t>(i)] =
            grow_fiber(roots.roots[static_cast<size_t>(i)], field, ender, cfg,
                       i);
      } catch (const Error& e) {
        errors[static_cast<size_t>(i)] = e.what();
      }
    }
  };

  if (threads == 1 || n < 2) {
    work(0, n);
  } else {
    const int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      const int begin = n * w / workers;
      const int end = n * (w + 1) / workers;
      pool.emplace_back(work, begin, end);
    }
    for (auto& t : pool) t.join();
  }

  GrowReport report;
  report.fibers.step = cfg.step;
  for (int i = 0; i < n; ++i) {
    if (errors[static_cast<size_t>(i)].empty())
      report.fibers.fibers.push_back(std::move(grown[static_cast<size_t>(i)]));
    else
      report.failures.push_back({i, errors[static_cast<size_t>(i)]});
  }
  if (report.fibers.empty())
    fail(Errc::root_out_of_domain,
         "grow_all: every root failed (" + report.failures.front().message +
             ")");
  return report;
}

}  // namespace fibrow
