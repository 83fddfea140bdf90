#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "driveclone/datamodel.hpp"
#include "driveclone/geometry.hpp"
#include "driveclone/nn/tensor.hpp"

namespace driveclone::pipeline {

/// Where the front car's acceleration features come from.
enum class FrontAccelSource {
  label,                 // box accel_v only; zero when absent
  differenced,           // difference the box's global velocity across frames
  label_or_differenced,  // accel_v when present, else differenced
};

std::string_view to_string(FrontAccelSource source);
FrontAccelSource front_accel_source_from_string(std::string_view name);

struct PipelineConfig {
  std::size_t history_len = 10;
  std::size_t horizon_len = 5;
  std::size_t stride = 1;
  std::size_t smooth_window = 5;
  geometry::DetectionConfig detection;
  FrontAccelSource front_accel = FrontAccelSource::label_or_differenced;

  std::size_t window_span() const noexcept { return history_len + horizon_len; }
  void validate() const;
};

/// a_0 = 0; a_t = (v_t - v_{t-1}) / (timestamp_t - timestamp_{t-1}).
Segment compute_accelerations(const Segment& segment);

/// Centered moving average over ego_accel_g with half-width window/2; the
/// window truncates at the segment ends. Throws ConfigError on even windows.
Segment smooth_accelerations(const Segment& segment, std::size_t window);

/// Same rule applied to a bare series.
std::vector<Vec3> centered_moving_average(std::span<const Vec3> series, std::size_t window);

/// Twelve features of one frame. `previous` is consulted only when the front
/// car's acceleration must be differenced.
FeatureVector extract_features(const Frame& frame, const PipelineConfig& cfg,
                               const Frame* previous = nullptr);

/// Per-frame arrays of one segment after acceleration, smoothing and feature
/// extraction. Raw accelerations are kept for diagnostics.
struct ProcessedSegment {
  std::string segment_id;
  std::vector<FeatureVector> features;
  std::vector<Vec3> raw_accel;
  std::vector<Vec3> smoothed_accel;
  std::map<CameraView, nn::Tensor> embeddings;  // view -> [frames x D]

  std::size_t size() const noexcept { return features.size(); }
};

ProcessedSegment process_segment(const Segment& segment, const PipelineConfig& cfg);

/// One training example: `history_len` frames of inputs and `horizon_len`
/// future (a_x, a_y) targets.
struct WindowSample {
  nn::Tensor features;                          // [history x 12]
  std::map<CameraView, nn::Tensor> embeddings;  // view -> [history x D]
  nn::Tensor target;                            // [horizon x 2], smoothed
  nn::Tensor raw_target;                        // [horizon x 2], unsmoothed
  nn::Tensor history_accel;                     // [history x 2], smoothed
  std::string segment_id;
  std::size_t start_index = 0;

  std::size_t history_len() const { return features.rows(); }
  std::size_t horizon_len() const { return target.rows(); }
  std::size_t embedding_dim() const;
};

/// Windows starting at 0, stride, 2*stride, ... that fit inside the segment.
std::vector<WindowSample> build_windows(const ProcessedSegment& segment, const PipelineConfig& cfg);
std::vector<WindowSample> build_windows(const Segment& segment, const PipelineConfig& cfg);

/// Process and window every segment, in order.
std::vector<WindowSample> build_dataset(std::span<const Segment> segments, const PipelineConfig& cfg);

struct NormalizerStats {
  std::array<double, kFeatureCount> mean{};
  std::array<double, kFeatureCount> std{};

  static NormalizerStats identity();
  void validate() const;

  friend bool operator==(const NormalizerStats&, const NormalizerStats&) = default;
};

inline constexpr double kStdFloor = 1e-6;

/// Population mean/std per feature over every history row. Accumulation
/// follows sample order, so results do not depend on how callers batch work.
NormalizerStats fit_normalizer(std::span<const WindowSample> samples);

/// (features - mean) / std row-wise; targets and embeddings untouched.
WindowSample apply_normalizer(WindowSample sample, const NormalizerStats& stats);
WindowSample invert_normalizer(WindowSample sample, const NormalizerStats& stats);
void apply_normalizer(std::span<WindowSample> samples, const NormalizerStats& stats);

/// Train and validation windows with no segment in common.
class DatasetSplit {
 public:
  /// Throws ValidationError if a segment id appears on both sides.
  DatasetSplit(std::vector<WindowSample> train, std::vector<WindowSample> validation);

  const std::vector<WindowSample>& train() const noexcept { return train_; }
  const std::vector<WindowSample>& validation() const noexcept { return validation_; }
  std::vector<WindowSample>& mutable_train() noexcept { return train_; }
  std::vector<WindowSample>& mutable_validation() noexcept { return validation_; }

 private:
  std::vector<WindowSample> train_;
  std::vector<WindowSample> validation_;
};

}  // namespace driveclone::pipeline
