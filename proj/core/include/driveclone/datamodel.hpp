#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace driveclone {

using Vec3 = std::array<double, 3>;

/// 4x4 homogeneous transform, row-major, row-vector convention:
/// [x_vehicle, 1] * m = [x_global, 1]. Translation lives in the last row.
struct Pose {
  std::array<double, 16> m{};

  static Pose identity();
  /// Rotation about +z by `yaw` radians followed by translation.
  static Pose from_yaw(double yaw, const Vec3& translation);

  double at(std::size_t row, std::size_t col) const { return m[row * 4 + col]; }
  Vec3 translation() const { return {m[12], m[13], m[14]}; }

  /// Throws ValidationError when the rotation block is not a proper rotation
  /// or the last column is not [0,0,0,1].
  void validate() const;

  friend bool operator==(const Pose&, const Pose&) = default;
};

enum class ObjectType { vehicle, pedestrian, cyclist, sign, unknown };

std::string_view to_string(ObjectType type);
ObjectType object_type_from_string(std::string_view name);

struct TrackedObject {
  std::string obj_id;
  ObjectType obj_type = ObjectType::unknown;
  Vec3 center_v{};
  Vec3 dims{1.0, 1.0, 1.0};  // length, width, height
  double heading = 0.0;      // (-pi, pi]
  Vec3 velocity_v{};
  std::optional<Vec3> accel_v;

  void validate() const;

  friend bool operator==(const TrackedObject&, const TrackedObject&) = default;
};

enum class CameraView { front, front_left, front_right, side_left, side_right };

inline constexpr std::array<CameraView, 5> kAllCameraViews = {
    CameraView::front, CameraView::front_left, CameraView::front_right, CameraView::side_left,
    CameraView::side_right};

std::string_view to_string(CameraView view);
CameraView camera_view_from_string(std::string_view name);

using EmbeddingMap = std::map<CameraView, std::vector<double>>;

struct Frame {
  std::string segment_id;
  std::int64_t t_index = 0;
  double timestamp_s = 0.0;
  Pose pose = Pose::identity();
  Vec3 ego_velocity_g{};
  std::optional<Vec3> ego_accel_g;
  std::vector<TrackedObject> labels;
  EmbeddingMap embeddings;

  friend bool operator==(const Frame&, const Frame&) = default;
};

/// Ordered frames of one drive.
struct Segment {
  std::string id;
  double nominal_dt = 0.1;
  std::vector<Frame> frames;

  std::size_t size() const noexcept { return frames.size(); }

  /// Checks index/timestamp ordering, nominal-dt tolerance and every frame's
  /// records. Errors name the segment id and offending field.
  void validate() const;

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Number of features per frame and their order.
inline constexpr std::size_t kFeatureCount = 12;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "v_x", "v_y", "v_z", "v_fx", "v_fy", "v_fz", "a_fx", "a_fy", "a_fz", "dx", "dy",
    "num_v_labels"};

/// One frame's features: ego velocity, front-car velocity/acceleration,
/// front-car displacement and the corridor vehicle count.
using FeatureVector = std::array<double, kFeatureCount>;

/// Median spacing of consecutive timestamps; 0.1 s default for <2 frames.
double estimate_nominal_dt(std::span<const Frame> frames);

/// Reads JSONL frames, groups them by segment_id (in order of first
/// appearance), sorts each group by t_index and validates. Embedding widths
/// must agree per view across the whole stream.
std::vector<Segment> parse_segments(std::istream& in);
std::vector<Segment> parse_segments(std::string_view text);

/// Canonical JSONL: one frame per line, fixed field order, shortest
/// round-trip rendering of reals. ego_accel_g is not part of the format.
void serialize_segments(std::span<const Segment> segments, std::ostream& out);
std::string serialize_segments(std::span<const Segment> segments);

}  // namespace driveclone
