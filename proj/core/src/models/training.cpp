#include "driveclone/models/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "driveclone/errors.hpp"
#include "driveclone/eval/protocol.hpp"
#include "driveclone/models/baseline_nn.hpp"
#include "driveclone/models/encoder_decoder.hpp"
#include "driveclone/models/stacked_regressor.hpp"
#include "driveclone/nn/adam.hpp"
#include "driveclone/nn/rng.hpp"
#include "io/json_codec.hpp"

namespace driveclone::models {
namespace {

void require_embeddings(const ArchitectureSpec& spec,
                        std::span<const pipeline::WindowSample> windows, const char* split) {
  for (CameraView v : spec.views()) {
    for (const auto& w : windows) {
      const auto it = w.embeddings.find(v);
      if (it == w.embeddings.end()) {
        throw ConfigError(std::string(to_string(spec.variant)) + " requires '" +
                          std::string(to_string(v)) + "' embeddings, absent from " + split +
                          " window " + w.segment_id + "@" + std::to_string(w.start_index));
      }
      if (it->second.cols() != spec.embedding_dim) {
        throw ConfigError("embedding dimension mismatch for '" + std::string(to_string(v)) +
                          "': data has " + std::to_string(it->second.cols()) + ", model expects " +
                          std::to_string(spec.embedding_dim));
      }
    }
  }
}

std::pair<double, double> val_mae(Model& model, std::span<const pipeline::WindowSample> val) {
  if (val.empty()) return {std::nan(""), std::nan("")};
  const auto report = eval::evaluate_predictions(val, model.predict(val));
  return {report.mae_x, report.mae_y};
}

void copy_params(const nn::ParamList& from, std::vector<nn::Tensor>& to) {
  to.clear();
  for (const auto& p : from) to.push_back(*p.tensor);
}

}  // namespace

std::unique_ptr<Model> build_model(const ArchitectureSpec& spec, std::uint64_t seed) {
  nn::Rng rng(nn::mix_seed(seed, 1));
  switch (spec.variant) {
    case Architecture::baseline_nn: {
      auto m = std::make_unique<BaselineNN>(spec);
      m->initialize(rng);
      return m;
    }
    case Architecture::stacked_lr:
      return std::make_unique<StackedRegressor>(spec);
    default: {
      auto m = std::make_unique<EncoderDecoder>(spec);
      m->initialize(rng);
      return m;
    }
  }
}

TrainingRun train(Model& model, std::span<const pipeline::WindowSample> train_windows,
                  std::span<const pipeline::WindowSample> val_windows, const nn::TrainConfig& cfg,
                  const pipeline::NormalizerStats& normalizer,
                  const pipeline::PipelineConfig& pipeline, const EpochCallback& on_epoch) {
  cfg.validate();
  const auto& spec = model.spec();
  if (train_windows.empty()) throw ValidationError("no training windows");
  require_embeddings(spec, train_windows, "training");
  require_embeddings(spec, val_windows, "validation");

  const auto start = std::chrono::steady_clock::now();
  TrainingRun run;

  if (auto* stacked = dynamic_cast<StackedRegressor*>(&model)) {
    stacked->fit(train_windows);
    nn::Tensor target({train_windows.size(), spec.horizon_len, 2});
    for (std::size_t i = 0; i < train_windows.size(); ++i) {
      std::copy_n(train_windows[i].target.raw(), spec.horizon_len * 2,
                  target.raw() + i * spec.horizon_len * 2);
    }
    run.train_loss.push_back(nn::loss(stacked->predict(train_windows), target, cfg.loss));
    run.epochs_run = 1;
  } else {
    auto* diff = dynamic_cast<DifferentiableModel*>(&model);
    if (diff == nullptr) throw ConfigError("model cannot be trained by gradient descent");

    std::vector<pipeline::WindowSample> frame_rows;
    std::span<const pipeline::WindowSample> samples = train_windows;
    if (spec.variant == Architecture::baseline_nn) {
      frame_rows = frame_samples(train_windows);
      samples = frame_rows;
    }
    const auto views = spec.views();
    const nn::ParamList params = model.parameters();
    nn::AdamState adam = nn::AdamState::for_params(params);
    nn::Rng shuffle_rng(nn::mix_seed(cfg.seed, 2));
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<nn::Tensor> grads;

    double best = std::numeric_limits<double>::infinity();
    std::size_t since_best = 0;
    std::vector<nn::Tensor> best_params;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      shuffle_rng.shuffle(order.begin(), order.end());
      double total = 0.0;
      std::size_t batch_index = 0;
      for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch_size, ++batch_index) {
        const std::size_t hi = std::min(order.size(), lo + cfg.batch_size);
        const auto idx = std::span(order).subspan(lo, hi - lo);
        const WindowBatch batch = WindowBatch::gather(samples, idx, views, spec.embedding_dim);
        const double value = diff->loss_and_gradients(batch, cfg.loss, grads);
        if (!std::isfinite(value)) {
          char msg[160];
          std::snprintf(msg, sizeof msg,
                        "non-finite loss at epoch %zu, batch %zu (parameter norm %.6g)", epoch + 1,
                        batch_index + 1, nn::global_norm(params));
          throw TrainingError(msg);
        }
        nn::adam_step(params, grads, adam, cfg.learning_rate);
        total += value * static_cast<double>(idx.size());
      }
      const double epoch_loss = total / static_cast<double>(order.size());
      run.train_loss.push_back(epoch_loss);
      run.epochs_run = epoch + 1;
      if (on_epoch) on_epoch(epoch + 1, epoch_loss);

      if (cfg.early_stopping && !val_windows.empty()) {
        const auto [mx, my] = val_mae(model, val_windows);
        const double score = 0.5 * (mx + my);
        if (score < best) {
          best = score;
          since_best = 0;
          copy_params(params, best_params);
        } else if (++since_best >= cfg.patience) {
          run.early_stopped = true;
          break;
        }
      }
    }
    if (!best_params.empty()) {
      for (std::size_t i = 0; i < params.size(); ++i) *params[i].tensor = best_params[i];
    }
  }

  std::tie(run.val_mae_x, run.val_mae_y) = val_mae(model, val_windows);
  run.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  run.artifact = make_artifact(model, normalizer, pipeline, cfg);
  run.artifact.train_loss = run.train_loss;
  return run;
}

TrainingRun train_variant(const ArchitectureSpec& spec, const pipeline::DatasetSplit& raw_split,
                          const nn::TrainConfig& cfg, const pipeline::PipelineConfig& pipeline,
                          const EpochCallback& on_epoch) {
  const auto stats = pipeline::fit_normalizer(raw_split.train());
  std::vector<pipeline::WindowSample> train_set = raw_split.train();
  std::vector<pipeline::WindowSample> val_set = raw_split.validation();
  pipeline::apply_normalizer(train_set, stats);
  pipeline::apply_normalizer(val_set, stats);
  auto model = build_model(spec, cfg.seed);
  return train(*model, train_set, val_set, cfg, stats, pipeline, on_epoch);
}

std::string run_to_json(const TrainingRun& run) {
  using io::detail::ojson;
  ojson j;
  j["model_id"] = run.artifact.id();
  j["architecture"] = io::detail::to_ojson(run.artifact.spec);
  j["parameter_count"] = [&] {
    std::size_t n = 0;
    for (const auto& [name, t] : run.artifact.params) n += t.size();
    return n;
  }();
  j["epochs_run"] = run.epochs_run;
  j["early_stopped"] = run.early_stopped;
  j["train_loss"] = run.train_loss;
  j["val_mae_x"] = std::isfinite(run.val_mae_x) ? ojson(run.val_mae_x) : ojson(nullptr);
  j["val_mae_y"] = std::isfinite(run.val_mae_y) ? ojson(run.val_mae_y) : ojson(nullptr);
  j["wall_clock_seconds"] = run.seconds;
  j["train"] = io::detail::to_ojson(run.artifact.train);
  j["pipeline"] = io::detail::to_ojson(run.artifact.pipeline);
  j["config_snapshot"] = run.artifact.config_snapshot;
  return j.dump(2) + "\n";
}

}  // namespace driveclone::models
