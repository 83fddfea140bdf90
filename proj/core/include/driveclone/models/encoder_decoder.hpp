#pragma once

#include <vector>

#include "driveclone/models/architecture.hpp"
#include "driveclone/nn/dense.hpp"
#include "driveclone/nn/lstm.hpp"
#include "driveclone/nn/rng.hpp"

namespace driveclone::models {

/// LSTM encoder-decoder shared by lstm_12, lstm_front and lstm_all.
///
/// One encoder per channel (features first, then each camera view). With a
/// single encoder its final (h, c) seeds the decoder directly. With several,
/// the final states are concatenated as [h_1..h_k, c_1..c_k] and a linear
/// layer maps them to the decoder's [h0, c0]. The decoder is fed the context
/// h0 at every step and a linear head maps each hidden state to (a_x, a_y).
class EncoderDecoder final : public DifferentiableModel {
 public:
  /// Parameters are zero; call initialize() before training.
  explicit EncoderDecoder(ArchitectureSpec spec);

  void initialize(nn::Rng& rng);

  const ArchitectureSpec& spec() const override { return spec_; }
  nn::ParamList parameters() override;

  nn::Tensor forward(const WindowBatch& batch) const override;
  double loss_and_gradients(const WindowBatch& batch, nn::LossKind kind,
                            std::vector<nn::Tensor>& grads) override;

  std::size_t encoder_count() const { return encoders_.size(); }
  bool has_fusion() const { return encoders_.size() > 1; }
  nn::LstmCellParams& encoder(std::size_t i) { return encoders_[i]; }
  nn::LstmCellParams& decoder() { return decoder_; }
  nn::DenseParams& head() { return head_; }

 private:
  struct Trace;
  nn::Tensor run(const WindowBatch& batch, Trace* trace) const;
  const std::vector<nn::Tensor>& channel_inputs(const WindowBatch& batch, std::size_t i) const;

  ArchitectureSpec spec_;
  std::vector<CameraView> views_;
  std::vector<nn::LstmCellParams> encoders_;
  nn::DenseParams fusion_;
  nn::LstmCellParams decoder_;
  nn::DenseParams head_;
};

}  // namespace driveclone::models
