#include "driveclone/models/architecture.hpp"

#include <algorithm>

#include "driveclone/errors.hpp"

namespace driveclone::models {
namespace {
constexpr std::array<std::string_view, 5> kNames = {"baseline_nn", "stacked_lr", "lstm_12",
                                                     "lstm_front", "lstm_all"};
}

std::string_view to_string(Architecture arch) { return kNames[static_cast<std::size_t>(arch)]; }

Architecture architecture_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<Architecture>(i);
  }
  throw ConfigError("unknown architecture '" + std::string(name) + "'");
}

bool is_lstm(Architecture arch) {
  return arch == Architecture::lstm_12 || arch == Architecture::lstm_front ||
         arch == Architecture::lstm_all;
}

std::vector<CameraView> views_for(Architecture arch) {
  switch (arch) {
    case Architecture::lstm_front: return {CameraView::front};
    case Architecture::lstm_all: return {kAllCameraViews.begin(), kAllCameraViews.end()};
    default: return {};
  }
}

ArchitectureSpec ArchitectureSpec::for_variant(Architecture variant, std::size_t embedding_dim) {
  ArchitectureSpec spec;
  spec.variant = variant;
  spec.embedding_dim = views_for(variant).empty() ? 0 : embedding_dim;
  return spec;
}

void ArchitectureSpec::validate() const {
  if (history_len < 1 || horizon_len < 1) throw ConfigError("history and horizon must be >= 1");
  if (is_lstm(variant) && hidden < 1) throw ConfigError("LSTM hidden size must be >= 1");
  const bool needs_views = !views().empty();
  if (needs_views && embedding_dim == 0) {
    throw ConfigError(std::string(to_string(variant)) + " requires camera embeddings (embedding_dim > 0)");
  }
  if (!needs_views && embedding_dim != 0) {
    throw ConfigError(std::string(to_string(variant)) + " does not use embeddings");
  }
  if (variant == Architecture::stacked_lr) {
    if (ridge_lambdas.empty()) throw ConfigError("stacked_lr needs at least one base learner");
    for (double l : ridge_lambdas) {
      if (!(l >= 0.0)) throw ConfigError("ridge lambda must be >= 0");
    }
    if (stacking_folds < 2) throw ConfigError("stacking_folds must be >= 2");
  }
  if (variant == Architecture::baseline_nn &&
      std::any_of(mlp_hidden.begin(), mlp_hidden.end(), [](std::size_t n) { return n == 0; })) {
    throw ConfigError("baseline_nn hidden layer sizes must be >= 1");
  }
}

WindowBatch WindowBatch::gather(std::span<const pipeline::WindowSample> windows,
                                std::span<const std::size_t> indices,
                                std::span<const CameraView> views, std::size_t embedding_dim) {
  WindowBatch batch;
  batch.size = indices.size();
  if (indices.empty()) return batch;
  const auto& first = windows[indices.front()];
  const std::size_t steps = first.history_len();
  const std::size_t horizon = first.horizon_len();
  const std::size_t b = indices.size();
  batch.features.assign(steps, nn::Tensor({b, kFeatureCount}));
  batch.target = nn::Tensor({b, horizon, 2});
  for (CameraView v : views) batch.embeddings[v].assign(steps, nn::Tensor({b, embedding_dim}));

  for (std::size_t r = 0; r < b; ++r) {
    const auto& w = windows[indices[r]];
    if (w.history_len() != steps || w.horizon_len() != horizon ||
        w.features.cols() != kFeatureCount) {
      throw ShapeError("window " + w.segment_id + "@" + std::to_string(w.start_index) +
                       " has shape " + w.features.shape_string() + "/" + w.target.shape_string() +
                       ", batch expects [" + std::to_string(steps) + "x12]/[" +
                       std::to_string(horizon) + "x2]");
    }
    for (std::size_t t = 0; t < steps; ++t) {
      std::copy_n(w.features.raw() + t * kFeatureCount, kFeatureCount,
                  batch.features[t].raw() + r * kFeatureCount);
    }
    std::copy_n(w.target.raw(), horizon * 2, batch.target.raw() + r * horizon * 2);
    for (CameraView v : views) {
      const auto it = w.embeddings.find(v);
      if (it == w.embeddings.end()) {
        throw ConfigError("window " + w.segment_id + "@" + std::to_string(w.start_index) +
                          " has no '" + std::string(to_string(v)) + "' embeddings");
      }
      if (it->second.cols() != embedding_dim) {
        throw ConfigError("embedding dimension mismatch for view '" + std::string(to_string(v)) +
                          "': data has " + std::to_string(it->second.cols()) + ", model expects " +
                          std::to_string(embedding_dim));
      }
      auto& steps_v = batch.embeddings[v];
      for (std::size_t t = 0; t < steps; ++t) {
        std::copy_n(it->second.raw() + t * embedding_dim, embedding_dim,
                    steps_v[t].raw() + r * embedding_dim);
      }
    }
  }
  return batch;
}

std::size_t Model::parameter_count() { return nn::scalar_count(parameters()); }

nn::Tensor DifferentiableModel::predict(std::span<const pipeline::WindowSample> windows) const {
  const auto& s = spec();
  if (windows.empty()) return nn::Tensor({0, s.horizon_len, 2});
  std::vector<std::size_t> idx(windows.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const auto views = s.views();
  auto batch = WindowBatch::gather(windows, idx, views, s.embedding_dim);
  if (batch.target.dim(1) != s.horizon_len) {
    batch.target = nn::Tensor({batch.size, s.horizon_len, 2});
  }
  return forward(batch);
}

}  // namespace driveclone::models
