#pragma once

#include <string_view>

#include "driveclone/nn/tensor.hpp"

namespace driveclone::nn {

enum class LossKind { mse, mae };

std::string_view to_string(LossKind kind);
LossKind loss_kind_from_string(std::string_view name);

/// Mean over all elements of |pred - target| (mae) or (pred - target)^2 (mse).
double loss(const Tensor& pred, const Tensor& target, LossKind kind);

/// d loss / d pred, same shape as pred. The mae subgradient at 0 is 0.
Tensor loss_gradient(const Tensor& pred, const Tensor& target, LossKind kind);

}  // namespace driveclone::nn
