#pragma once

#include <span>
#include <vector>

#include "driveclone/nn/dense.hpp"
#include "driveclone/nn/rng.hpp"
#include "driveclone/nn/tensor.hpp"

namespace driveclone::nn {

/// Standard LSTM cell with forget gate. Gate blocks are laid out along the
/// 4H axis in the order [input, forget, candidate, output].
///
///   z = x * W + h * U + b
///   i = sigmoid(z_i), f = sigmoid(z_f), g = tanh(z_g), o = sigmoid(z_o)
///   c' = f * c + i * g
///   h' = o * tanh(c')
///
/// W is stored [I x 4H] and U is [H x 4H] (row-vector convention).
struct LstmCellParams {
  Tensor input_weight;
  Tensor recurrent_weight;
  Tensor bias;

  static LstmCellParams zeros(std::size_t input_size, std::size_t hidden_size);
  /// uniform(-s, s), s = 1/sqrt(I + H); forget-gate bias 1.
  static LstmCellParams init(std::size_t input_size, std::size_t hidden_size, Rng& rng);

  std::size_t input_size() const { return input_weight.rows(); }
  std::size_t hidden_size() const { return recurrent_weight.rows(); }
  std::size_t parameter_count() const {
    return input_weight.size() + recurrent_weight.size() + bias.size();
  }
  void validate() const;
};

inline constexpr const char* kGateOrder = "i,f,g,o";

struct LstmState {
  Tensor h;
  Tensor c;
};

/// One step for a single sample: x[I], h[H], c[H].
LstmState lstm_cell_step(const Tensor& x, const Tensor& h, const Tensor& c,
                         const LstmCellParams& p);

/// Runs the cell over seq[T x I] from a zero state; returns the final state.
LstmState run_encoder(const Tensor& seq, const LstmCellParams& p);

/// Feeds `context` at every step starting from `init` and maps each hidden
/// state through the linear head. Returns [steps x head_out].
Tensor run_decoder(const LstmState& init, const Tensor& context, std::size_t steps,
                   const LstmCellParams& p, const DenseParams& head);

/// Batched unrolled LSTM that keeps what backpropagation through time needs.
class LstmUnroll {
 public:
  /// inputs[t] is [B x I]. h0/c0 are [B x H]; null means zero.
  void forward(const LstmCellParams& p, std::span<const Tensor> inputs, const Tensor* h0 = nullptr,
               const Tensor* c0 = nullptr);

  /// The same [B x I] input at every step (decoder context).
  void forward_repeated(const LstmCellParams& p, const Tensor& input, std::size_t steps,
                        const Tensor* h0 = nullptr, const Tensor* c0 = nullptr);

  std::size_t steps() const noexcept { return hidden_.size(); }
  std::size_t batch() const noexcept { return batch_; }
  const Tensor& hidden(std::size_t t) const { return hidden_[t]; }
  const Tensor& cell(std::size_t t) const { return cell_[t]; }
  const Tensor& final_hidden() const { return hidden_.back(); }
  const Tensor& final_cell() const { return cell_.back(); }

  struct Gradients {
    std::vector<Tensor> d_inputs;  // per step; forward() only
    Tensor d_repeated_input;       // forward_repeated() only
    Tensor d_h0;
    Tensor d_c0;
  };

  /// d_hidden[t] is dL/dh_t coming from outside the recurrence (may be
  /// empty). d_h_last/d_c_last seed the final state (null = zero).
  /// Parameter gradients accumulate into `grads`.
  void backward(const LstmCellParams& p, std::span<const Tensor> d_hidden,
                const Tensor* d_h_last, const Tensor* d_c_last, LstmCellParams& grads,
                Gradients& out, bool want_input_grads = true) const;

 private:
  void prepare(const LstmCellParams& p, std::size_t batch, std::size_t steps, const Tensor* h0,
               const Tensor* c0);
  // preact_base already holds x * W + b for this step.
  void step(const LstmCellParams& p, std::size_t t, const Tensor& preact_base);

  std::size_t batch_ = 0;
  std::size_t hidden_size_ = 0;
  std::size_t input_size_ = 0;
  bool repeated_ = false;
  std::vector<Tensor> inputs_;
  Tensor h0_;
  Tensor c0_;
  std::vector<Tensor> gates_;  // activated [B x 4H]
  std::vector<Tensor> cell_;
  std::vector<Tensor> tanh_cell_;
  std::vector<Tensor> hidden_;
};

}  // namespace driveclone::nn
