#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "driveclone/models/artifact.hpp"
#include "driveclone/nn/train_config.hpp"
#include "driveclone/pipeline.hpp"

namespace driveclone::models {

struct TrainingRun {
  ModelArtifact artifact;
  std::vector<double> train_loss;  // one entry per epoch run
  double val_mae_x = 0.0;
  double val_mae_y = 0.0;
  double seconds = 0.0;
  std::size_t epochs_run = 0;
  bool early_stopped = false;
};

/// Fresh model for `spec`; gradient-trained variants are initialized from
/// `seed`.
std::unique_ptr<Model> build_model(const ArchitectureSpec& spec, std::uint64_t seed);

/// Called after every epoch with (epoch, train loss).
using EpochCallback = std::function<void(std::size_t, double)>;

/// Trains `model` in place on windows already normalized with `normalizer`.
///
/// Gradient models run minibatch Adam for cfg.epochs epochs, reshuffling the
/// training set each epoch from cfg.seed. With early stopping the epoch with
/// the best validation MAE is kept once `patience` epochs pass without
/// improvement. The stacked regressor is fitted in closed form and reports a
/// single epoch. Throws ConfigError when the data lacks required embeddings
/// and TrainingError on a non-finite loss.
TrainingRun train(Model& model, std::span<const pipeline::WindowSample> train_windows,
                  std::span<const pipeline::WindowSample> val_windows, const nn::TrainConfig& cfg,
                  const pipeline::NormalizerStats& normalizer,
                  const pipeline::PipelineConfig& pipeline, const EpochCallback& on_epoch = {});

/// Fits the normalizer on the training split, normalizes both splits and
/// trains a fresh model.
TrainingRun train_variant(const ArchitectureSpec& spec, const pipeline::DatasetSplit& raw_split,
                          const nn::TrainConfig& cfg, const pipeline::PipelineConfig& pipeline,
                          const EpochCallback& on_epoch = {});

/// Loss curve, final metrics and config snapshot as JSON.
std::string run_to_json(const TrainingRun& run);

}  // namespace driveclone::models
