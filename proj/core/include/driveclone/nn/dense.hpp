#pragma once

#include <string_view>

#include "driveclone/nn/rng.hpp"
#include "driveclone/nn/tensor.hpp"

namespace driveclone::nn {

enum class Activation { linear, relu, tanh };

std::string_view to_string(Activation act);

/// weight is [in x out] so that y = x * weight + bias.
struct DenseParams {
  Tensor weight;
  Tensor bias;

  static DenseParams zeros(std::size_t in, std::size_t out);
  /// uniform(-1/sqrt(in), 1/sqrt(in)) weights, zero bias.
  static DenseParams init(std::size_t in, std::size_t out, Rng& rng);

  std::size_t in_size() const { return weight.rows(); }
  std::size_t out_size() const { return weight.cols(); }
  std::size_t parameter_count() const { return weight.size() + bias.size(); }
};

/// x[N x I] * W[I x O] + b[O], activation applied elementwise.
Tensor dense_forward(const Tensor& x, const Tensor& w, const Tensor& b, Activation act);
Tensor dense_forward(const Tensor& x, const DenseParams& p, Activation act);

/// Backward through one dense layer given its input and activated output.
/// Accumulates into `grads`; writes d_x when non-null.
void dense_backward(const Tensor& x, const DenseParams& p, const Tensor& y, Activation act,
                    Tensor d_y, DenseParams& grads, Tensor* d_x);

}  // namespace driveclone::nn
