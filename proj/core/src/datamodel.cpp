#include "driveclone/datamodel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "driveclone/errors.hpp"

namespace driveclone {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::array<std::string_view, 5> kObjectTypeNames = {"vehicle", "pedestrian", "cyclist",
                                                               "sign", "unknown"};
constexpr std::array<std::string_view, 5> kViewNames = {"front", "front_left", "front_right",
                                                         "side_left", "side_right"};

bool finite3(const Vec3& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

std::string frame_context(const Frame& f) {
  return "segment " + f.segment_id + " frame " + std::to_string(f.t_index);
}

// --- JSON decoding --------------------------------------------------------

struct LineReader {
  std::size_t line;

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line, what); }

  const json& field(const json& obj, const char* name) const {
    auto it = obj.find(name);
    if (it == obj.end()) fail(std::string("missing field '") + name + "'");
    return *it;
  }

  double number(const json& v, const std::string& name) const {
    if (!v.is_number()) fail("field '" + name + "' must be a number");
    return v.get<double>();
  }

  template <std::size_t N>
  std::array<double, N> fixed_array(const json& v, const std::string& name) const {
    if (!v.is_array() || v.size() != N) {
      fail("field '" + name + "' must be an array of " + std::to_string(N) + " numbers");
    }
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = number(v[i], name);
    return out;
  }

  std::string string(const json& v, const std::string& name) const {
    if (!v.is_string()) fail("field '" + name + "' must be a string");
    return v.get<std::string>();
  }

  void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                      const std::string& where) const {
    for (const auto& [key, _] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail("unknown field '" + key + "' in " + where);
      }
    }
  }

  TrackedObject label(const json& v, std::size_t index) const {
    const std::string where = "labels[" + std::to_string(index) + "]";
    if (!v.is_object()) fail(where + " must be an object");
    reject_unknown(v, {"obj_id", "obj_type", "center_v", "dims", "heading", "velocity_v", "accel_v"},
                   where);
    TrackedObject obj;
    obj.obj_id = string(field(v, "obj_id"), where + ".obj_id");
    const std::string type = string(field(v, "obj_type"), where + ".obj_type");
    try {
      obj.obj_type = object_type_from_string(type);
    } catch (const Error& e) {
      fail(where + ".obj_type: " + e.what());
    }
    obj.center_v = fixed_array<3>(field(v, "center_v"), where + ".center_v");
    obj.dims = fixed_array<3>(field(v, "dims"), where + ".dims");
    obj.heading = number(field(v, "heading"), where + ".heading");
    obj.velocity_v = fixed_array<3>(field(v, "velocity_v"), where + ".velocity_v");
    if (auto it = v.find("accel_v"); it != v.end() && !it->is_null()) {
      obj.accel_v = fixed_array<3>(*it, where + ".accel_v");
    }
    return obj;
  }

  Frame frame(const json& v) const {
    if (!v.is_object()) fail("frame must be a JSON object");
    reject_unknown(v, {"segment_id", "t_index", "timestamp_s", "pose", "ego_velocity_g", "labels",
                       "embeddings"},
                   "frame");
    Frame f;
    f.segment_id = string(field(v, "segment_id"), "segment_id");
    const json& t = field(v, "t_index");
    if (!t.is_number_integer()) fail("field 't_index' must be an integer");
    f.t_index = t.get<std::int64_t>();
    f.timestamp_s = number(field(v, "timestamp_s"), "timestamp_s");
    f.pose.m = fixed_array<16>(field(v, "pose"), "pose");
    f.ego_velocity_g = fixed_array<3>(field(v, "ego_velocity_g"), "ego_velocity_g");
    const json& labels = field(v, "labels");
    if (!labels.is_array()) fail("field 'labels' must be an array");
    f.labels.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) f.labels.push_back(label(labels[i], i));
    if (auto it = v.find("embeddings"); it != v.end() && !it->is_null()) {
      if (!it->is_object()) fail("field 'embeddings' must be an object");
      for (const auto& [name, vec] : it->items()) {
        CameraView view;
        try {
          view = camera_view_from_string(name);
        } catch (const Error& e) {
          fail(std::string("embeddings: ") + e.what());
        }
        if (!vec.is_array()) fail("embeddings." + name + " must be an array");
        std::vector<double> values;
        values.reserve(vec.size());
        for (const auto& x : vec) values.push_back(number(x, "embeddings." + name));
        f.embeddings.emplace(view, std::move(values));
      }
    }
    return f;
  }
};

ordered_json vec_json(std::span<const double> v) {
  ordered_json arr = ordered_json::array();
  for (double x : v) arr.push_back(x);
  return arr;
}

ordered_json frame_json(const Frame& f) {
  ordered_json out;
  out["segment_id"] = f.segment_id;
  out["t_index"] = f.t_index;
  out["timestamp_s"] = f.timestamp_s;
  out["pose"] = vec_json(f.pose.m);
  out["ego_velocity_g"] = vec_json(f.ego_velocity_g);
  ordered_json labels = ordered_json::array();
  for (const auto& obj : f.labels) {
    ordered_json l;
    l["obj_id"] = obj.obj_id;
    l["obj_type"] = std::string(to_string(obj.obj_type));
    l["center_v"] = vec_json(obj.center_v);
    l["dims"] = vec_json(obj.dims);
    l["heading"] = obj.heading;
    l["velocity_v"] = vec_json(obj.velocity_v);
    if (obj.accel_v) l["accel_v"] = vec_json(*obj.accel_v);
    labels.push_back(std::move(l));
  }
  out["labels"] = std::move(labels);
  if (!f.embeddings.empty()) {
    ordered_json emb = ordered_json::object();
    for (const auto& [view, values] : f.embeddings) {
      emb[std::string(to_string(view))] = vec_json(values);
    }
    out["embeddings"] = std::move(emb);
  }
  return out;
}

void validate_frame(const Frame& f) {
  const std::string ctx = frame_context(f);
  if (f.t_index < 0) throw ValidationError(ctx + ": t_index must be non-negative");
  if (!std::isfinite(f.timestamp_s)) throw ValidationError(ctx + ": timestamp_s must be finite");
  if (!finite3(f.ego_velocity_g)) throw ValidationError(ctx + ": ego_velocity_g must be finite");
  if (f.ego_accel_g && !finite3(*f.ego_accel_g)) {
    throw ValidationError(ctx + ": ego_accel_g must be finite");
  }
  try {
    f.pose.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(ctx + ": " + e.what());
  }
  for (std::size_t i = 0; i < f.labels.size(); ++i) {
    try {
      f.labels[i].validate();
    } catch (const ValidationError& e) {
      throw ValidationError(ctx + " labels[" + std::to_string(i) + "]: " + e.what());
    }
  }
  for (const auto& [view, values] : f.embeddings) {
    for (double x : values) {
      if (!std::isfinite(x)) {
        throw ValidationError(ctx + ": embeddings." + std::string(to_string(view)) +
                              " must be finite");
      }
    }
  }
}

}  // namespace

Pose Pose::identity() {
  Pose p;
  p.m = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
  return p;
}

Pose Pose::from_yaw(double yaw, const Vec3& t) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  Pose p;
  // Row i is the image of vehicle axis i.
  p.m = {c, s, 0, 0, -s, c, 0, 0, 0, 0, 1, 0, t[0], t[1], t[2], 1};
  return p;
}

void Pose::validate() const {
  for (double x : m) {
    if (!std::isfinite(x)) throw ValidationError("pose must be finite");
  }
  if (m[3] != 0.0 || m[7] != 0.0 || m[11] != 0.0 || m[15] != 1.0) {
    throw ValidationError("pose last column must be [0,0,0,1]");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < 3; ++k) dot += at(k, i) * at(k, j);
      worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
    }
  }
  if (worst >= 1e-6) throw ValidationError("pose rotation block must be orthonormal");
  const double det = at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
                     at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
                     at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
  if (det <= 0.0) throw ValidationError("pose rotation must be proper (det > 0)");
}

std::string_view to_string(ObjectType type) {
  return kObjectTypeNames[static_cast<std::size_t>(type)];
}

ObjectType object_type_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kObjectTypeNames.size(); ++i) {
    if (kObjectTypeNames[i] == name) return static_cast<ObjectType>(i);
  }
  throw ValidationError("unknown object type '" + std::string(name) + "'");
}

std::string_view to_string(CameraView view) { return kViewNames[static_cast<std::size_t>(view)]; }

CameraView camera_view_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kViewNames.size(); ++i) {
    if (kViewNames[i] == name) return static_cast<CameraView>(i);
  }
  throw ValidationError("unknown camera view '" + std::string(name) + "'");
}

void TrackedObject::validate() const {
  if (!(dims[0] > 0.0 && dims[1] > 0.0 && dims[2] > 0.0)) {
    throw ValidationError("obj " + obj_id + ": dims must be > 0");
  }
  if (!finite3(center_v) || !finite3(dims) || !finite3(velocity_v) ||
      (accel_v && !finite3(*accel_v)) || !std::isfinite(heading)) {
    throw ValidationError("obj " + obj_id + ": values must be finite");
  }
  if (!(heading > -std::numbers::pi && heading <= std::numbers::pi)) {
    throw ValidationError("obj " + obj_id + ": heading must lie in (-pi, pi]");
  }
}

double estimate_nominal_dt(std::span<const Frame> frames) {
  if (frames.size() < 2) return 0.1;
  std::vector<double> dts;
  dts.reserve(frames.size() - 1);
  for (std::size_t i = 1; i < frames.size(); ++i) {
    dts.push_back(frames[i].timestamp_s - frames[i - 1].timestamp_s);
  }
  const auto mid = dts.begin() + static_cast<std::ptrdiff_t>(dts.size() / 2);
  std::nth_element(dts.begin(), mid, dts.end());
  return *mid;
}

void Segment::validate() const {
  if (!(nominal_dt > 0.0) || !std::isfinite(nominal_dt)) {
    throw ValidationError("segment " + id + ": nominal_dt must be positive");
  }
  std::size_t embedding_views = frames.empty() ? 0 : frames.front().embeddings.size();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Frame& f = frames[i];
    if (f.segment_id != id) {
      throw ValidationError("segment " + id + ": frame carries segment_id " + f.segment_id);
    }
    validate_frame(f);
    if (f.embeddings.size() != embedding_views) {
      throw ValidationError(frame_context(f) + ": embeddings must cover the same views on every frame");
    }
    if (i == 0) continue;
    const Frame& prev = frames[i - 1];
    if (f.t_index != prev.t_index + 1) {
      throw ValidationError(frame_context(f) + ": t_index must increase by 1 (previous " +
                            std::to_string(prev.t_index) + ")");
    }
    const double dt = f.timestamp_s - prev.timestamp_s;
    if (!(dt > 0.0)) {
      throw ValidationError(frame_context(f) + ": timestamp_s must be strictly increasing");
    }
    if (std::abs(dt - nominal_dt) > 0.1 * nominal_dt) {
      throw ValidationError(frame_context(f) + ": timestamp_s spacing " + std::to_string(dt) +
                            " deviates more than 10% from nominal " + std::to_string(nominal_dt));
    }
  }
}

std::vector<Segment> parse_segments(std::istream& in) {
  std::vector<Segment> segments;
  std::unordered_map<std::string, std::size_t> index_of;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json value;
    try {
      value = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
    }
    Frame frame = LineReader{line_no}.frame(value);
    auto [it, inserted] = index_of.try_emplace(frame.segment_id, segments.size());
    if (inserted) segments.push_back(Segment{frame.segment_id, 0.1, {}});
    segments[it->second].frames.push_back(std::move(frame));
  }

  std::map<CameraView, std::size_t> widths;
  for (auto& seg : segments) {
    std::stable_sort(seg.frames.begin(), seg.frames.end(),
                     [](const Frame& a, const Frame& b) { return a.t_index < b.t_index; });
    seg.nominal_dt = estimate_nominal_dt(seg.frames);
    seg.validate();
    for (const auto& f : seg.frames) {
      for (const auto& [view, values] : f.embeddings) {
        auto [w, inserted] = widths.try_emplace(view, values.size());
        if (!inserted && w->second != values.size()) {
          throw ValidationError(frame_context(f) + ": embeddings." + std::string(to_string(view)) +
                                " has width " + std::to_string(values.size()) + ", expected " +
                                std::to_string(w->second));
        }
      }
    }
  }
  return segments;
}

std::vector<Segment> parse_segments(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_segments(in);
}

void serialize_segments(std::span<const Segment> segments, std::ostream& out) {
  for (const auto& seg : segments) {
    for (const auto& f : seg.frames) out << frame_json(f).dump() << '\n';
  }
}

std::string serialize_segments(std::span<const Segment> segments) {
  std::ostringstream out;
  serialize_segments(segments, out);
  return out.str();
}

}  // namespace driveclone
