#pragma once

#include <cstdint>
#include <vector>

#include "driveclone/models/architecture.hpp"
#include "driveclone/nn/gradcheck.hpp"

namespace driveclone::models {

struct TinyModelConfig {
  std::size_t hidden = 4;
  std::size_t history = 3;
  std::size_t horizon = 5;
  std::size_t embedding_dim = 4;
  std::size_t batch = 3;
  std::uint64_t seed = 0;
};

/// Random normalized windows shaped for `cfg` (features, every camera view
/// and targets drawn from N(0, 1)).
std::vector<pipeline::WindowSample> random_windows(const TinyModelConfig& cfg);

/// Builds a small model of `variant`, draws a random batch and compares its
/// analytic mse gradients against central differences.
nn::GradCheckReport check_gradients(Architecture variant, const TinyModelConfig& cfg,
                                    double eps = 1e-5, double tol = 1e-4);

}  // namespace driveclone::models
