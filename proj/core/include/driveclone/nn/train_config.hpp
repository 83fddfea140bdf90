#pragma once

#include <cstddef>
#include <cstdint>

#include "driveclone/nn/loss.hpp"

namespace driveclone::nn {

struct TrainConfig {
  std::size_t epochs = 300;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  LossKind loss = LossKind::mse;
  bool early_stopping = false;
  std::size_t patience = 20;

  void validate() const;
};

}  // namespace driveclone::nn
