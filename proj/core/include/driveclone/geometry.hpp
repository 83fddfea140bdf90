#pragma once

#include <array>
#include <optional>
#include <string>

#include "driveclone/datamodel.hpp"

namespace driveclone::geometry {

/// Forward detection corridor [0, max_range] x [-tolerance, +tolerance] in
/// the ego vehicle frame. tolerance == 0 is the bare ray y = 0.
struct DetectionConfig {
  double tolerance = 1.0;
  double max_range = 100.0;

  void validate() const;
};

struct FrontInfo {
  std::string obj_id;
  double dx = 0.0;  // forward
  double dy = 0.0;  // left
  Vec3 velocity_g{};
  Vec3 accel_g{};
};

/// [p, 1] * pose, truncated to three components.
Vec3 to_global(const Vec3& p_vehicle, const Pose& pose);
/// Rigid inverse of to_global: (p - t) * R^T.
Vec3 to_vehicle(const Vec3& p_global, const Pose& pose);
/// Direction vectors (velocities, accelerations) use the rotation only.
Vec3 rotate_to_global(const Vec3& d_vehicle, const Pose& pose);
Vec3 rotate_to_vehicle(const Vec3& d_global, const Pose& pose);

/// Ground-plane footprint of a box: center, half extents along its own axes
/// and heading (counter-clockwise from +x).
struct OrientedRect {
  double cx = 0.0;
  double cy = 0.0;
  double half_length = 0.5;
  double half_width = 0.5;
  double heading = 0.0;

  static OrientedRect from_object(const TrackedObject& obj);
  std::array<std::array<double, 2>, 4> corners() const;
};

/// Largest separation between the rectangle and the corridor over the four
/// separating axes. Positive: disjoint by at least that distance. Negative:
/// overlapping, magnitude is the minimum penetration along those axes.
double corridor_clearance(const OrientedRect& rect, const DetectionConfig& cfg);

/// Separating-axis intersection test (touching counts as intersecting).
bool intersects_corridor(const OrientedRect& rect, const DetectionConfig& cfg);

/// Nearest vehicle ahead whose footprint meets the corridor. Ties on center x
/// go to the lexicographically smaller obj_id. Returned kinematics are
/// rotated into the global frame; accel_g is zero when the label has none.
std::optional<FrontInfo> detect_front_vehicle(const Frame& frame, const DetectionConfig& cfg);

/// Vehicles whose footprint meets the corridor, including any behind the ego.
std::size_t count_corridor_vehicles(const Frame& frame, const DetectionConfig& cfg);

}  // namespace driveclone::geometry
