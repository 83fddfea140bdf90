#include "driveclone/nn/loss.hpp"

#include <cmath>

#include "driveclone/errors.hpp"

namespace driveclone::nn {

std::string_view to_string(LossKind kind) { return kind == LossKind::mse ? "mse" : "mae"; }

LossKind loss_kind_from_string(std::string_view name) {
  if (name == "mse") return LossKind::mse;
  if (name == "mae") return LossKind::mae;
  throw ConfigError("unknown loss '" + std::string(name) + "' (expected mse or mae)");
}

double loss(const Tensor& pred, const Tensor& target, LossKind kind) {
  require_same_shape(pred, target, "loss");
  if (pred.size() == 0) throw ShapeError("loss: empty tensors");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    sum += kind == LossKind::mse ? d * d : std::abs(d);
  }
  return sum / static_cast<double>(pred.size());
}

Tensor loss_gradient(const Tensor& pred, const Tensor& target, LossKind kind) {
  require_same_shape(pred, target, "loss_gradient");
  Tensor g(pred.shape());
  const double scale = 1.0 / static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    if (kind == LossKind::mse) {
      g[i] = 2.0 * d * scale;
    } else {
      g[i] = d > 0.0 ? scale : (d < 0.0 ? -scale : 0.0);
    }
  }
  return g;
}

}  // namespace driveclone::nn
