#pragma once

#include <vector>

#include "driveclone/models/architecture.hpp"
#include "driveclone/nn/dense.hpp"
#include "driveclone/nn/rng.hpp"

namespace driveclone::models {

/// Per-frame MLP: 12 -> relu hidden layers -> 2 (linear). On a window it
/// reads the last history frame and repeats that prediction over the horizon.
class BaselineNN final : public DifferentiableModel {
 public:
  explicit BaselineNN(ArchitectureSpec spec);

  void initialize(nn::Rng& rng);

  const ArchitectureSpec& spec() const override { return spec_; }
  nn::ParamList parameters() override;

  nn::Tensor forward(const WindowBatch& batch) const override;
  double loss_and_gradients(const WindowBatch& batch, nn::LossKind kind,
                            std::vector<nn::Tensor>& grads) override;

  std::vector<nn::DenseParams>& layers() { return layers_; }

 private:
  std::vector<nn::Tensor> activations(const nn::Tensor& x) const;
  nn::Activation activation(std::size_t layer) const;

  ArchitectureSpec spec_;
  std::vector<nn::DenseParams> layers_;
};

/// Per-frame training rows taken from the history part of each window: one
/// single-step window per distinct (segment, frame), with that frame's
/// smoothed acceleration as target. Order follows first appearance.
std::vector<pipeline::WindowSample> frame_samples(std::span<const pipeline::WindowSample> windows);

}  // namespace driveclone::models
