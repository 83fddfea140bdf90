#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "driveclone/nn/parameters.hpp"
#include "driveclone/nn/tensor.hpp"

namespace driveclone::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::uint64_t step = 0;

  static AdamState for_params(const ParamList& params);
};

/// Bias-corrected Adam update applied in place. grads align with params.
void adam_step(const ParamList& params, std::span<const Tensor> grads, AdamState& state,
               double learning_rate, const AdamConfig& cfg = {});

}  // namespace driveclone::nn
