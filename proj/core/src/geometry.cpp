#include "driveclone/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "driveclone/errors.hpp"

namespace driveclone::geometry {
namespace {

using Vec2 = std::array<double, 2>;

// Projection interval of the corridor rectangle onto a unit axis.
std::pair<double, double> corridor_interval(const Vec2& axis, const DetectionConfig& cfg) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double x : {0.0, cfg.max_range}) {
    for (double y : {-cfg.tolerance, cfg.tolerance}) {
      const double p = x * axis[0] + y * axis[1];
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
  }
  return {lo, hi};
}

std::pair<double, double> rect_interval(const Vec2& axis, const OrientedRect& r) {
  const double c = std::cos(r.heading);
  const double s = std::sin(r.heading);
  const double center = r.cx * axis[0] + r.cy * axis[1];
  const double extent = r.half_length * std::abs(c * axis[0] + s * axis[1]) +
                        r.half_width * std::abs(-s * axis[0] + c * axis[1]);
  return {center - extent, center + extent};
}

bool is_candidate(const TrackedObject& obj, const DetectionConfig& cfg) {
  return obj.obj_type == ObjectType::vehicle &&
         intersects_corridor(OrientedRect::from_object(obj), cfg);
}

}  // namespace

void DetectionConfig::validate() const {
  if (!(tolerance >= 0.0) || !std::isfinite(tolerance)) {
    throw ConfigError("detection tolerance must be >= 0");
  }
  if (!(max_range > 0.0) || !std::isfinite(max_range)) {
    throw ConfigError("detection max_range must be > 0");
  }
}

Vec3 to_global(const Vec3& p, const Pose& pose) {
  Vec3 out{};
  for (std::size_t j = 0; j < 3; ++j) {
    out[j] = p[0] * pose.at(0, j) + p[1] * pose.at(1, j) + p[2] * pose.at(2, j) + pose.at(3, j);
  }
  return out;
}

Vec3 to_vehicle(const Vec3& p, const Pose& pose) {
  const Vec3 d = {p[0] - pose.at(3, 0), p[1] - pose.at(3, 1), p[2] - pose.at(3, 2)};
  return rotate_to_vehicle(d, pose);
}

Vec3 rotate_to_global(const Vec3& d, const Pose& pose) {
  Vec3 out{};
  for (std::size_t j = 0; j < 3; ++j) {
    out[j] = d[0] * pose.at(0, j) + d[1] * pose.at(1, j) + d[2] * pose.at(2, j);
  }
  return out;
}

Vec3 rotate_to_vehicle(const Vec3& d, const Pose& pose) {
  // d * R^T: component i is the dot product with row i of R.
  Vec3 out{};
  for (std::size_t i = 0; i < 3; ++i) {
    out[i] = d[0] * pose.at(i, 0) + d[1] * pose.at(i, 1) + d[2] * pose.at(i, 2);
  }
  return out;
}

OrientedRect OrientedRect::from_object(const TrackedObject& obj) {
  return {obj.center_v[0], obj.center_v[1], 0.5 * obj.dims[0], 0.5 * obj.dims[1], obj.heading};
}

std::array<std::array<double, 2>, 4> OrientedRect::corners() const {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  std::array<std::array<double, 2>, 4> out{};
  const double sx[4] = {1, -1, -1, 1};
  const double sy[4] = {1, 1, -1, -1};
  for (int i = 0; i < 4; ++i) {
    const double lx = sx[i] * half_length;
    const double ly = sy[i] * half_width;
    out[i] = {cx + c * lx - s * ly, cy + s * lx + c * ly};
  }
  return out;
}

double corridor_clearance(const OrientedRect& rect, const DetectionConfig& cfg) {
  const double c = std::cos(rect.heading);
  const double s = std::sin(rect.heading);
  const std::array<Vec2, 4> axes = {Vec2{1.0, 0.0}, Vec2{0.0, 1.0}, Vec2{c, s}, Vec2{-s, c}};
  double clearance = -std::numeric_limits<double>::infinity();
  for (const auto& axis : axes) {
    const auto [a_lo, a_hi] = corridor_interval(axis, cfg);
    const auto [b_lo, b_hi] = rect_interval(axis, rect);
    clearance = std::max(clearance, std::max(b_lo - a_hi, a_lo - b_hi));
  }
  return clearance;
}

bool intersects_corridor(const OrientedRect& rect, const DetectionConfig& cfg) {
  return corridor_clearance(rect, cfg) <= 0.0;
}

std::optional<FrontInfo> detect_front_vehicle(const Frame& frame, const DetectionConfig& cfg) {
  const TrackedObject* best = nullptr;
  for (const auto& obj : frame.labels) {
    if (!(obj.center_v[0] > 0.0) || !is_candidate(obj, cfg)) continue;
    if (best == nullptr || obj.center_v[0] < best->center_v[0] ||
        (obj.center_v[0] == best->center_v[0] && obj.obj_id < best->obj_id)) {
      best = &obj;
    }
  }
  if (best == nullptr) return std::nullopt;
  FrontInfo info;
  info.obj_id = best->obj_id;
  info.dx = best->center_v[0];
  info.dy = best->center_v[1];
  info.velocity_g = rotate_to_global(best->velocity_v, frame.pose);
  if (best->accel_v) info.accel_g = rotate_to_global(*best->accel_v, frame.pose);
  return info;
}

std::size_t count_corridor_vehicles(const Frame& frame, const DetectionConfig& cfg) {
  return static_cast<std::size_t>(std::count_if(
      frame.labels.begin(), frame.labels.end(),
      [&](const TrackedObject& obj) { return is_candidate(obj, cfg); }));
}

}  // namespace driveclone::geometry
