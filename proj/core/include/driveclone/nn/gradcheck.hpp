#pragma once

#include <functional>
#include <span>
#include <string>

#include "driveclone/nn/parameters.hpp"

namespace driveclone::nn {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
  std::size_t checked = 0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Compares analytic gradients against central differences
/// (L(p + eps) - L(p - eps)) / 2eps for every scalar parameter. The relative
/// error is |a - n| / max(|a|, |n|, floor); `floor` keeps near-zero entries
/// from dividing by zero. Parameters are restored afterwards.
GradCheckReport grad_check(const ParamList& params, std::span<const Tensor> analytic,
                           const std::function<double()>& loss_at_current_params, double eps,
                           double tol, double floor = 1e-6);

}  // namespace driveclone::nn
