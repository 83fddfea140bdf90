#pragma once

#include <vector>

#include "driveclone/models/architecture.hpp"

namespace driveclone::models {

enum class Combiner {
  learned,   // least squares on held-out base predictions, per output
  identity,  // single base passed through unchanged
};

/// Two-level linear stack over the flattened history window.
///
/// Each base is a ridge regression (intercept unpenalized) from the
/// history_len * 12 features to all horizon_len * 2 targets. The combiner
/// weights for output o solve min ||Z_o w - y_o|| in the minimum-norm sense,
/// where column j of Z_o holds base j's out-of-fold predictions. Folds group
/// whole segments, assigned round-robin in order of first appearance.
class StackedRegressor final : public Model {
 public:
  explicit StackedRegressor(ArchitectureSpec spec, Combiner combiner = Combiner::learned);

  /// Throws SolverError when a ridge system is singular or too badly
  /// conditioned, ValidationError when there are too few segments to fold.
  void fit(std::span<const pipeline::WindowSample> windows);

  const ArchitectureSpec& spec() const override { return spec_; }
  nn::Tensor predict(std::span<const pipeline::WindowSample> windows) const override;
  nn::ParamList parameters() override;

  std::size_t base_count() const { return bases_.size(); }
  const nn::Tensor& base_weight(std::size_t j) const { return bases_[j]; }
  const nn::Tensor& combiner_weight() const { return combiner_; }
  Combiner combiner() const { return mode_; }

 private:
  std::size_t input_width() const { return spec_.history_len * kFeatureCount + 1; }
  std::size_t output_width() const { return spec_.horizon_len * 2; }

  ArchitectureSpec spec_;
  Combiner mode_;
  std::vector<nn::Tensor> bases_;  // [(F + 1) x O], intercept in the last row
  nn::Tensor combiner_;            // [bases x O]
};

/// Stacked regressor with `base_count` ridge bases. Strengths come from the
/// spec when it lists that many, otherwise they are spread log-uniformly over
/// [1e-2, 1e2].
StackedRegressor build_stacked_regressor(std::size_t base_count, ArchitectureSpec spec = {});

/// Largest condition number accepted for a ridge normal-equation system.
inline constexpr double kMaxConditionNumber = 1e12;

}  // namespace driveclone::models
