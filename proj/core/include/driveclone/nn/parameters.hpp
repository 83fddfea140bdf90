#pragma once

#include <string>
#include <vector>

#include "driveclone/nn/tensor.hpp"

namespace driveclone::nn {

/// Non-owning handle to one named parameter tensor of a model.
struct NamedParam {
  std::string name;
  Tensor* tensor;
};

using ParamList = std::vector<NamedParam>;

/// Zero tensors with the same shapes, in the same order.
std::vector<Tensor> zeros_like(const ParamList& params);
std::size_t scalar_count(const ParamList& params);
double global_norm(const ParamList& params);

}  // namespace driveclone::nn
