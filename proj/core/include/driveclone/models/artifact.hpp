#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "driveclone/models/architecture.hpp"
#include "driveclone/models/stacked_regressor.hpp"
#include "driveclone/nn/train_config.hpp"
#include "driveclone/pipeline.hpp"

namespace driveclone::models {

inline constexpr int kArtifactVersion = 1;

/// Everything needed to rebuild a trained predictor.
struct ModelArtifact {
  int version = kArtifactVersion;
  ArchitectureSpec spec;
  Combiner combiner = Combiner::learned;  // stacked_lr only
  std::vector<std::pair<std::string, nn::Tensor>> params;
  pipeline::NormalizerStats normalizer = pipeline::NormalizerStats::identity();
  pipeline::PipelineConfig pipeline;
  nn::TrainConfig train;
  std::vector<double> train_loss;
  std::string config_snapshot;  // text of the config file used, if any

  std::string id() const;
};

/// Copies the model's parameters into a new artifact.
ModelArtifact make_artifact(Model& model, const pipeline::NormalizerStats& normalizer,
                            const pipeline::PipelineConfig& pipeline, const nn::TrainConfig& train);

/// Builds the model described by the artifact and loads its parameters.
/// Throws IoError on missing or misshapen tensors.
std::unique_ptr<Model> instantiate(const ModelArtifact& artifact);

std::string encode_artifact(const ModelArtifact& artifact);
ModelArtifact decode_artifact(const std::string& bytes);
void save_artifact(const std::filesystem::path& path, const ModelArtifact& artifact);
ModelArtifact load_artifact(const std::filesystem::path& path);

/// Checks that `window` carries what the artifact's model consumes.
/// Throws ConfigError on a missing view or embedding width mismatch.
void check_compatible(const ModelArtifact& artifact, const pipeline::WindowSample& window);

/// Forward pass bound to one artifact.
class Predictor {
 public:
  explicit Predictor(const ModelArtifact& artifact);

  /// [horizon x 2] for one window already normalized with the artifact's
  /// statistics.
  nn::Tensor predict(const pipeline::WindowSample& normalized) const;
  /// [N x horizon x 2]; normalizes raw windows first.
  nn::Tensor predict_raw(std::span<const pipeline::WindowSample> raw) const;

  const ModelArtifact& artifact() const { return artifact_; }

 private:
  ModelArtifact artifact_;
  std::unique_ptr<Model> model_;
};

/// One-shot prediction for a normalized window.
nn::Tensor predict(const ModelArtifact& artifact, const pipeline::WindowSample& normalized);

}  // namespace driveclone::models
