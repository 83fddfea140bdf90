#include "driveclone/nn/adam.hpp"

#include <cmath>

#include "driveclone/errors.hpp"

namespace driveclone::nn {

std::vector<Tensor> zeros_like(const ParamList& params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (const auto& p : params) out.emplace_back(p.tensor->shape());
  return out;
}

std::size_t scalar_count(const ParamList& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.tensor->size();
  return n;
}

double global_norm(const ParamList& params) {
  double sq = 0.0;
  for (const auto& p : params) {
    for (double x : p.tensor->data()) sq += x * x;
  }
  return std::sqrt(sq);
}

AdamState AdamState::for_params(const ParamList& params) {
  return {zeros_like(params), zeros_like(params), 0};
}

void adam_step(const ParamList& params, std::span<const Tensor> grads, AdamState& state,
               double learning_rate, const AdamConfig& cfg) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size()) {
    throw ShapeError("adam_step: parameter, gradient and state counts differ");
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = *params[k].tensor;
    const Tensor& g = grads[k];
    require_same_shape(p, g, "adam_step");
    Tensor& m = state.m[k];
    Tensor& v = state.v[k];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

}  // namespace driveclone::nn
