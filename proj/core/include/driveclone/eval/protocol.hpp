#pragma once

#include <span>
#include <string>
#include <vector>

#include "driveclone/nn/tensor.hpp"
#include "driveclone/pipeline.hpp"

namespace driveclone::eval {

struct ClipMae {
  std::string segment_id;
  std::size_t windows = 0;
  double mae_x = 0.0;
  double mae_y = 0.0;
  double raw_mae_x = 0.0;  // against unsmoothed targets
  double raw_mae_y = 0.0;
};

/// MAE per clip (segment) and their unweighted mean. Clips are sorted by
/// segment id, so the aggregate does not depend on input order.
struct EvalReport {
  std::string model_id;
  std::string dataset_id;
  std::vector<ClipMae> clips;
  double mae_x = 0.0;
  double mae_y = 0.0;
  double raw_mae_x = 0.0;
  double raw_mae_y = 0.0;

  std::size_t clip_count() const { return clips.size(); }
  /// Mean of mae_x and mae_y; used to rank models on one number.
  double mean_mae() const { return 0.5 * (mae_x + mae_y); }
};

/// `pred` is [N x S x 2] aligned with `windows`. Throws ValidationError on
/// an empty set and ShapeError on misaligned predictions.
EvalReport evaluate_predictions(std::span<const pipeline::WindowSample> windows,
                                const nn::Tensor& pred, std::string model_id = {},
                                std::string dataset_id = {});

/// Recomputes the aggregate fields from `clips`.
void aggregate(EvalReport& report);

/// Always (0, 0).
nn::Tensor zero_predictions(std::span<const pipeline::WindowSample> windows);
/// Last observed smoothed acceleration repeated over the horizon.
nn::Tensor persistence_predictions(std::span<const pipeline::WindowSample> windows);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);

}  // namespace driveclone::eval
