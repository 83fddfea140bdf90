#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "driveclone/datamodel.hpp"
#include "driveclone/nn/loss.hpp"
#include "driveclone/nn/parameters.hpp"
#include "driveclone/nn/tensor.hpp"
#include "driveclone/pipeline.hpp"

namespace driveclone::models {

enum class Architecture { baseline_nn, stacked_lr, lstm_12, lstm_front, lstm_all };

inline constexpr std::array<Architecture, 5> kAllArchitectures = {
    Architecture::baseline_nn, Architecture::stacked_lr, Architecture::lstm_12,
    Architecture::lstm_front, Architecture::lstm_all};

std::string_view to_string(Architecture arch);
Architecture architecture_from_string(std::string_view name);
bool is_lstm(Architecture arch);

/// Camera channels consumed by a variant: none, {front}, or all five.
std::vector<CameraView> views_for(Architecture arch);

struct ArchitectureSpec {
  Architecture variant = Architecture::lstm_12;
  std::size_t hidden = 128;                     // LSTM hidden size
  std::vector<std::size_t> mlp_hidden = {8, 4};  // baseline NN
  std::size_t embedding_dim = 0;
  std::size_t history_len = 10;
  std::size_t horizon_len = 5;
  std::vector<double> ridge_lambdas = {0.01, 1.0, 100.0};  // stacked_lr bases
  std::size_t stacking_folds = 5;

  static ArchitectureSpec for_variant(Architecture variant, std::size_t embedding_dim = 0);

  std::vector<CameraView> views() const { return views_for(variant); }
  void validate() const;
};

/// Time-major view of a minibatch of windows.
struct WindowBatch {
  std::size_t size = 0;
  std::vector<nn::Tensor> features;                            // per step [B x 12]
  std::map<CameraView, std::vector<nn::Tensor>> embeddings;  // per view, per step [B x D]
  nn::Tensor target;                                           // [B x S x 2]

  /// Gathers windows[indices]. Only `views` are copied; missing views or a
  /// width other than `embedding_dim` raise ConfigError.
  static WindowBatch gather(std::span<const pipeline::WindowSample> windows,
                            std::span<const std::size_t> indices,
                            std::span<const CameraView> views, std::size_t embedding_dim);
};

/// Common surface of every trained predictor. Inputs are windows already
/// normalized with the model's statistics.
class Model {
 public:
  virtual ~Model() = default;

  virtual const ArchitectureSpec& spec() const = 0;
  Architecture architecture() const { return spec().variant; }

  /// [B x horizon x 2] accelerations for the given windows.
  virtual nn::Tensor predict(std::span<const pipeline::WindowSample> windows) const = 0;

  /// Named parameter tensors in a fixed order.
  virtual nn::ParamList parameters() = 0;

  std::size_t parameter_count();
};

/// Model trained by gradient descent on minibatches.
class DifferentiableModel : public Model {
 public:
  /// [B x S x 2] where S is the batch target's horizon.
  virtual nn::Tensor forward(const WindowBatch& batch) const = 0;

  /// Batch loss; `grads` is overwritten and aligns with parameters().
  virtual double loss_and_gradients(const WindowBatch& batch, nn::LossKind kind,
                                    std::vector<nn::Tensor>& grads) = 0;

  nn::Tensor predict(std::span<const pipeline::WindowSample> windows) const override;
};

}  // namespace driveclone::models
