#include "driveclone/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "driveclone/errors.hpp"

namespace driveclone::pipeline {
namespace {

constexpr std::array<std::string_view, 3> kFrontAccelNames = {"label", "differenced",
                                                               "label_or_differenced"};

const TrackedObject* find_object(const Frame& frame, const std::string& id) {
  for (const auto& obj : frame.labels) {
    if (obj.obj_id == id) return &obj;
  }
  return nullptr;
}

Vec3 differenced_front_accel(const Frame& frame, const Frame* previous,
                             const geometry::FrontInfo& front) {
  if (previous == nullptr) return {};
  const TrackedObject* before = find_object(*previous, front.obj_id);
  const double dt = frame.timestamp_s - previous->timestamp_s;
  if (before == nullptr || !(dt > 0.0)) return {};
  const Vec3 v_before = geometry::rotate_to_global(before->velocity_v, previous->pose);
  return {(front.velocity_g[0] - v_before[0]) / dt, (front.velocity_g[1] - v_before[1]) / dt,
          (front.velocity_g[2] - v_before[2]) / dt};
}

}  // namespace

std::string_view to_string(FrontAccelSource source) {
  return kFrontAccelNames[static_cast<std::size_t>(source)];
}

FrontAccelSource front_accel_source_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kFrontAccelNames.size(); ++i) {
    if (kFrontAccelNames[i] == name) return static_cast<FrontAccelSource>(i);
  }
  throw ConfigError("unknown front acceleration source '" + std::string(name) + "'");
}

void PipelineConfig::validate() const {
  if (history_len < 1) throw ConfigError("history_len must be >= 1");
  if (horizon_len < 1) throw ConfigError("horizon_len must be >= 1");
  if (stride < 1) throw ConfigError("stride must be >= 1");
  if (smooth_window < 1 || smooth_window % 2 == 0) {
    throw ConfigError("smooth_window must be an odd integer >= 1");
  }
  detection.validate();
}

Segment compute_accelerations(const Segment& segment) {
  Segment out = segment;
  for (std::size_t t = 0; t < out.frames.size(); ++t) {
    Frame& f = out.frames[t];
    if (t == 0) {
      f.ego_accel_g = Vec3{0.0, 0.0, 0.0};
      continue;
    }
    const Frame& prev = out.frames[t - 1];
    const double dt = f.timestamp_s - prev.timestamp_s;
    if (!(dt > 0.0)) {
      throw ValidationError("segment " + segment.id + " frame " + std::to_string(f.t_index) +
                            ": timestamp_s must be strictly increasing");
    }
    f.ego_accel_g = Vec3{(f.ego_velocity_g[0] - prev.ego_velocity_g[0]) / dt,
                         (f.ego_velocity_g[1] - prev.ego_velocity_g[1]) / dt,
                         (f.ego_velocity_g[2] - prev.ego_velocity_g[2]) / dt};
  }
  return out;
}

std::vector<Vec3> centered_moving_average(std::span<const Vec3> series, std::size_t window) {
  if (window < 1 || window % 2 == 0) {
    throw ConfigError("smoothing window must be an odd integer >= 1, got " + std::to_string(window));
  }
  const std::size_t half = window / 2;
  const std::size_t n = series.size();
  std::vector<Vec3> out(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t lo = t >= half ? t - half : 0;
    const std::size_t hi = std::min(n - 1, t + half);
    Vec3 sum{};
    for (std::size_t k = lo; k <= hi; ++k) {
      for (std::size_t d = 0; d < 3; ++d) sum[d] += series[k][d];
    }
    const double count = static_cast<double>(hi - lo + 1);
    out[t] = {sum[0] / count, sum[1] / count, sum[2] / count};
  }
  return out;
}

Segment smooth_accelerations(const Segment& segment, std::size_t window) {
  std::vector<Vec3> series;
  series.reserve(segment.frames.size());
  for (const auto& f : segment.frames) {
    if (!f.ego_accel_g) {
      throw ValidationError("segment " + segment.id + " frame " + std::to_string(f.t_index) +
                            ": ego_accel_g missing; compute accelerations first");
    }
    series.push_back(*f.ego_accel_g);
  }
  const auto smoothed = centered_moving_average(series, window);
  Segment out = segment;
  for (std::size_t t = 0; t < out.frames.size(); ++t) out.frames[t].ego_accel_g = smoothed[t];
  return out;
}

FeatureVector extract_features(const Frame& frame, const PipelineConfig& cfg,
                               const Frame* previous) {
  FeatureVector f{};
  f[0] = frame.ego_velocity_g[0];
  f[1] = frame.ego_velocity_g[1];
  f[2] = frame.ego_velocity_g[2];
  if (auto front = geometry::detect_front_vehicle(frame, cfg.detection)) {
    const TrackedObject* obj = find_object(frame, front->obj_id);
    Vec3 accel{};
    switch (cfg.front_accel) {
      case FrontAccelSource::label:
        accel = front->accel_g;
        break;
      case FrontAccelSource::differenced:
        accel = differenced_front_accel(frame, previous, *front);
        break;
      case FrontAccelSource::label_or_differenced:
        accel = obj != nullptr && obj->accel_v ? front->accel_g
                                               : differenced_front_accel(frame, previous, *front);
        break;
    }
    f[3] = front->velocity_g[0];
    f[4] = front->velocity_g[1];
    f[5] = front->velocity_g[2];
    f[6] = accel[0];
    f[7] = accel[1];
    f[8] = accel[2];
    f[9] = front->dx;
    f[10] = front->dy;
  }
  f[11] = static_cast<double>(geometry::count_corridor_vehicles(frame, cfg.detection));
  return f;
}

ProcessedSegment process_segment(const Segment& segment, const PipelineConfig& cfg) {
  cfg.validate();
  const Segment with_accel = compute_accelerations(segment);
  ProcessedSegment out;
  out.segment_id = segment.id;
  const std::size_t n = segment.frames.size();
  out.features.reserve(n);
  out.raw_accel.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const Frame& f = with_accel.frames[t];
    out.features.push_back(extract_features(f, cfg, t > 0 ? &with_accel.frames[t - 1] : nullptr));
    out.raw_accel.push_back(*f.ego_accel_g);
  }
  out.smoothed_accel = centered_moving_average(out.raw_accel, cfg.smooth_window);

  if (n > 0) {
    for (const auto& [view, first] : segment.frames.front().embeddings) {
      nn::Tensor table({n, first.size()});
      for (std::size_t t = 0; t < n; ++t) {
        const auto it = segment.frames[t].embeddings.find(view);
        if (it == segment.frames[t].embeddings.end() || it->second.size() != first.size()) {
          throw ValidationError("segment " + segment.id + " frame " +
                                std::to_string(segment.frames[t].t_index) + ": embeddings." +
                                std::string(to_string(view)) + " missing or wrong width");
        }
        std::copy(it->second.begin(), it->second.end(), table.slice(t).begin());
      }
      out.embeddings.emplace(view, std::move(table));
    }
  }
  return out;
}

std::size_t WindowSample::embedding_dim() const {
  return embeddings.empty() ? 0 : embeddings.begin()->second.cols();
}

std::vector<WindowSample> build_windows(const ProcessedSegment& seg, const PipelineConfig& cfg) {
  cfg.validate();
  std::vector<WindowSample> out;
  const std::size_t span = cfg.window_span();
  const std::size_t hist = cfg.history_len;
  const std::size_t horizon = cfg.horizon_len;
  if (seg.size() < span) return out;
  out.reserve((seg.size() - span) / cfg.stride + 1);
  for (std::size_t s = 0; s + span <= seg.size(); s += cfg.stride) {
    WindowSample w;
    w.segment_id = seg.segment_id;
    w.start_index = s;
    w.features = nn::Tensor({hist, kFeatureCount});
    w.history_accel = nn::Tensor({hist, 2});
    for (std::size_t r = 0; r < hist; ++r) {
      std::copy(seg.features[s + r].begin(), seg.features[s + r].end(), w.features.slice(r).begin());
      w.history_accel(r, 0) = seg.smoothed_accel[s + r][0];
      w.history_accel(r, 1) = seg.smoothed_accel[s + r][1];
    }
    w.target = nn::Tensor({horizon, 2});
    w.raw_target = nn::Tensor({horizon, 2});
    for (std::size_t r = 0; r < horizon; ++r) {
      const std::size_t t = s + hist + r;
      w.target(r, 0) = seg.smoothed_accel[t][0];
      w.target(r, 1) = seg.smoothed_accel[t][1];
      w.raw_target(r, 0) = seg.raw_accel[t][0];
      w.raw_target(r, 1) = seg.raw_accel[t][1];
    }
    for (const auto& [view, table] : seg.embeddings) {
      const std::size_t d = table.cols();
      nn::Tensor slice({hist, d});
      std::copy_n(table.raw() + s * d, hist * d, slice.raw());
      w.embeddings.emplace(view, std::move(slice));
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<WindowSample> build_windows(const Segment& segment, const PipelineConfig& cfg) {
  return build_windows(process_segment(segment, cfg), cfg);
}

std::vector<WindowSample> build_dataset(std::span<const Segment> segments,
                                        const PipelineConfig& cfg) {
  std::vector<WindowSample> out;
  for (const auto& seg : segments) {
    auto windows = build_windows(seg, cfg);
    std::move(windows.begin(), windows.end(), std::back_inserter(out));
  }
  return out;
}

NormalizerStats NormalizerStats::identity() {
  NormalizerStats s;
  s.mean.fill(0.0);
  s.std.fill(1.0);
  return s;
}

void NormalizerStats::validate() const {
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (!std::isfinite(mean[i]) || !(std[i] > 0.0) || !std::isfinite(std[i])) {
      throw ValidationError("normalizer stats for feature " + std::string(kFeatureNames[i]) +
                            " must be finite with std > 0");
    }
  }
}

NormalizerStats fit_normalizer(std::span<const WindowSample> samples) {
  if (samples.empty()) throw ValidationError("cannot fit normalizer on an empty training set");
  std::array<double, kFeatureCount> sum{};
  std::size_t rows = 0;
  for (const auto& s : samples) {
    if (s.features.rank() != 2 || s.features.cols() != kFeatureCount) {
      throw ShapeError("window features must be [history x 12], got " + s.features.shape_string());
    }
    for (std::size_t r = 0; r < s.features.rows(); ++r) {
      for (std::size_t j = 0; j < kFeatureCount; ++j) sum[j] += s.features(r, j);
    }
    rows += s.features.rows();
  }
  NormalizerStats stats;
  for (std::size_t j = 0; j < kFeatureCount; ++j) stats.mean[j] = sum[j] / static_cast<double>(rows);
  std::array<double, kFeatureCount> sq{};
  for (const auto& s : samples) {
    for (std::size_t r = 0; r < s.features.rows(); ++r) {
      for (std::size_t j = 0; j < kFeatureCount; ++j) {
        const double d = s.features(r, j) - stats.mean[j];
        sq[j] += d * d;
      }
    }
  }
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    stats.std[j] = std::max(kStdFloor, std::sqrt(sq[j] / static_cast<double>(rows)));
  }
  return stats;
}

WindowSample apply_normalizer(WindowSample sample, const NormalizerStats& stats) {
  for (std::size_t r = 0; r < sample.features.rows(); ++r) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      sample.features(r, j) = (sample.features(r, j) - stats.mean[j]) / stats.std[j];
    }
  }
  return sample;
}

WindowSample invert_normalizer(WindowSample sample, const NormalizerStats& stats) {
  for (std::size_t r = 0; r < sample.features.rows(); ++r) {
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      sample.features(r, j) = sample.features(r, j) * stats.std[j] + stats.mean[j];
    }
  }
  return sample;
}

void apply_normalizer(std::span<WindowSample> samples, const NormalizerStats& stats) {
  for (auto& s : samples) s = apply_normalizer(std::move(s), stats);
}

DatasetSplit::DatasetSplit(std::vector<WindowSample> train, std::vector<WindowSample> validation)
    : train_(std::move(train)), validation_(std::move(validation)) {
  std::set<std::string> train_ids;
  for (const auto& w : train_) train_ids.insert(w.segment_id);
  for (const auto& w : validation_) {
    if (train_ids.count(w.segment_id) != 0) {
      throw ValidationError("segment " + w.segment_id +
                            " appears in both the training and validation split");
    }
  }
}

}  // namespace driveclone::pipeline
