#include "driveclone/models/baseline_nn.hpp"

#include <set>
#include <utility>

#include "driveclone/errors.hpp"

namespace driveclone::models {

BaselineNN::BaselineNN(ArchitectureSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  if (spec_.variant != Architecture::baseline_nn) {
    throw ConfigError("BaselineNN built with variant " + std::string(to_string(spec_.variant)));
  }
  std::size_t in = kFeatureCount;
  for (std::size_t width : spec_.mlp_hidden) {
    layers_.push_back(nn::DenseParams::zeros(in, width));
    in = width;
  }
  layers_.push_back(nn::DenseParams::zeros(in, 2));
}

void BaselineNN::initialize(nn::Rng& rng) {
  for (auto& l : layers_) l = nn::DenseParams::init(l.in_size(), l.out_size(), rng);
}

nn::ParamList BaselineNN::parameters() {
  nn::ParamList out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const std::string prefix = "dense" + std::to_string(i);
    out.push_back({prefix + ".weight", &layers_[i].weight});
    out.push_back({prefix + ".bias", &layers_[i].bias});
  }
  return out;
}

nn::Activation BaselineNN::activation(std::size_t layer) const {
  return layer + 1 == layers_.size() ? nn::Activation::linear : nn::Activation::relu;
}

// activations[0] is the input, activations[i + 1] the output of layer i.
std::vector<nn::Tensor> BaselineNN::activations(const nn::Tensor& x) const {
  std::vector<nn::Tensor> acts{x};
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    acts.push_back(nn::dense_forward(acts.back(), layers_[i], activation(i)));
  }
  return acts;
}

nn::Tensor BaselineNN::forward(const WindowBatch& batch) const {
  const std::size_t steps = batch.target.dim(1);
  const nn::Tensor y = activations(batch.features.back()).back();
  nn::Tensor pred({batch.size, steps, 2});
  for (std::size_t r = 0; r < batch.size; ++r) {
    for (std::size_t t = 0; t < steps; ++t) {
      pred[(r * steps + t) * 2] = y(r, 0);
      pred[(r * steps + t) * 2 + 1] = y(r, 1);
    }
  }
  return pred;
}

double BaselineNN::loss_and_gradients(const WindowBatch& batch, nn::LossKind kind,
                                      std::vector<nn::Tensor>& grads) {
  const std::size_t steps = batch.target.dim(1);
  const auto acts = activations(batch.features.back());
  const nn::Tensor& y = acts.back();
  nn::Tensor pred({batch.size, steps, 2});
  for (std::size_t r = 0; r < batch.size; ++r) {
    for (std::size_t t = 0; t < steps; ++t) {
      pred[(r * steps + t) * 2] = y(r, 0);
      pred[(r * steps + t) * 2 + 1] = y(r, 1);
    }
  }
  const double value = nn::loss(pred, batch.target, kind);
  const nn::Tensor d_pred = nn::loss_gradient(pred, batch.target, kind);

  nn::Tensor d_y({batch.size, 2});
  for (std::size_t r = 0; r < batch.size; ++r) {
    for (std::size_t t = 0; t < steps; ++t) {
      d_y(r, 0) += d_pred[(r * steps + t) * 2];
      d_y(r, 1) += d_pred[(r * steps + t) * 2 + 1];
    }
  }

  std::vector<nn::DenseParams> g;
  for (const auto& l : layers_) g.push_back(nn::DenseParams::zeros(l.in_size(), l.out_size()));
  for (std::size_t i = layers_.size(); i-- > 0;) {
    nn::Tensor d_x;
    nn::dense_backward(acts[i], layers_[i], acts[i + 1], activation(i), std::move(d_y), g[i],
                       i > 0 ? &d_x : nullptr);
    d_y = std::move(d_x);
  }

  grads.clear();
  for (auto& l : g) {
    grads.push_back(std::move(l.weight));
    grads.push_back(std::move(l.bias));
  }
  return value;
}

std::vector<pipeline::WindowSample> frame_samples(
    std::span<const pipeline::WindowSample> windows) {
  std::vector<pipeline::WindowSample> out;
  std::set<std::pair<std::string, std::size_t>> seen;
  for (const auto& w : windows) {
    for (std::size_t t = 0; t < w.history_len(); ++t) {
      if (!seen.emplace(w.segment_id, w.start_index + t).second) continue;
      pipeline::WindowSample s;
      s.segment_id = w.segment_id;
      s.start_index = w.start_index + t;
      s.features = nn::Tensor({1, kFeatureCount});
      std::copy_n(w.features.raw() + t * kFeatureCount, kFeatureCount, s.features.raw());
      s.target = nn::Tensor({1, 2}, {w.history_accel(t, 0), w.history_accel(t, 1)});
      s.raw_target = s.target;
      s.history_accel = s.target;
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace driveclone::models
