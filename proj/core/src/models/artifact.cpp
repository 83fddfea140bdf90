#include "driveclone/models/artifact.hpp"

#include "driveclone/errors.hpp"
#include "driveclone/io/tensor_file.hpp"
#include "driveclone/models/baseline_nn.hpp"
#include "driveclone/models/encoder_decoder.hpp"
#include "driveclone/nn/lstm.hpp"
#include "io/json_codec.hpp"

namespace driveclone::models {

std::string ModelArtifact::id() const {
  return std::string(to_string(spec.variant)) + "-seed" + std::to_string(train.seed);
}

ModelArtifact make_artifact(Model& model, const pipeline::NormalizerStats& normalizer,
                            const pipeline::PipelineConfig& pipeline,
                            const nn::TrainConfig& train) {
  ModelArtifact a;
  a.spec = model.spec();
  if (const auto* stacked = dynamic_cast<const StackedRegressor*>(&model)) {
    a.combiner = stacked->combiner();
  }
  for (const auto& p : model.parameters()) a.params.emplace_back(p.name, *p.tensor);
  a.normalizer = normalizer;
  a.pipeline = pipeline;
  a.train = train;
  return a;
}

std::unique_ptr<Model> instantiate(const ModelArtifact& artifact) {
  std::unique_ptr<Model> model;
  switch (artifact.spec.variant) {
    case Architecture::baseline_nn:
      model = std::make_unique<BaselineNN>(artifact.spec);
      break;
    case Architecture::stacked_lr:
      model = std::make_unique<StackedRegressor>(artifact.spec, artifact.combiner);
      break;
    default:
      model = std::make_unique<EncoderDecoder>(artifact.spec);
      break;
  }
  const auto params = model->parameters();
  if (params.size() != artifact.params.size()) {
    throw IoError("artifact has " + std::to_string(artifact.params.size()) + " tensors, " +
                  std::string(to_string(artifact.spec.variant)) + " needs " +
                  std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& [name, t] = artifact.params[i];
    if (name != params[i].name || !t.same_shape(*params[i].tensor)) {
      throw IoError("artifact tensor " + name + t.shape_string() + " does not match expected " +
                    params[i].name + params[i].tensor->shape_string());
    }
    *params[i].tensor = t;
  }
  return model;
}

std::string encode_artifact(const ModelArtifact& artifact) {
  using io::detail::ojson;
  ojson meta;
  meta["artifact_version"] = artifact.version;
  meta["model_id"] = artifact.id();
  meta["architecture"] = io::detail::to_ojson(artifact.spec);
  meta["combiner"] = artifact.combiner == Combiner::identity ? "identity" : "learned";
  meta["gate_order"] = nn::kGateOrder;
  meta["weight_layout"] = "row-vector: y = x * W + b; W is [in x out]";
  meta["normalization"] = "features z-scored with stored stats; embeddings and targets raw";
  meta["normalizer"] = io::detail::to_ojson(artifact.normalizer);
  meta["pipeline"] = io::detail::to_ojson(artifact.pipeline);
  meta["train"] = io::detail::to_ojson(artifact.train);
  meta["train_loss"] = artifact.train_loss;
  meta["config_snapshot"] = artifact.config_snapshot;

  io::TensorFile file;
  file.kind = "model";
  file.meta_json = meta.dump();
  file.tensors = artifact.params;
  return io::encode_tensor_file(file);
}

ModelArtifact decode_artifact(const std::string& bytes) {
  const io::TensorFile file = io::decode_tensor_file(bytes);
  if (file.kind != "model") throw IoError("expected a model file, got '" + file.kind + "'");
  return io::detail::guarded("artifact", [&] {
    const auto meta = nlohmann::json::parse(file.meta_json);
    ModelArtifact a;
    a.version = meta.at("artifact_version").get<int>();
    if (a.version != kArtifactVersion) {
      throw IoError("unsupported artifact version " + std::to_string(a.version));
    }
    if (meta.at("gate_order").get<std::string>() != nn::kGateOrder) {
      throw IoError("artifact gate order " + meta.at("gate_order").dump() + " is not " +
                    nn::kGateOrder);
    }
    a.spec = io::detail::architecture_spec_from(meta.at("architecture"));
    a.combiner = meta.at("combiner").get<std::string>() == "identity" ? Combiner::identity
                                                                        : Combiner::learned;
    a.normalizer = io::detail::normalizer_from(meta.at("normalizer"));
    a.pipeline = io::detail::pipeline_config_from(meta.at("pipeline"));
    a.train = io::detail::train_config_from(meta.at("train"));
    a.train_loss = meta.at("train_loss").get<std::vector<double>>();
    a.config_snapshot = meta.at("config_snapshot").get<std::string>();
    a.params = file.tensors;
    return a;
  });
}

void save_artifact(const std::filesystem::path& path, const ModelArtifact& artifact) {
  io::write_text_file(path, encode_artifact(artifact));
}

ModelArtifact load_artifact(const std::filesystem::path& path) {
  return decode_artifact(io::read_text_file(path));
}

void check_compatible(const ModelArtifact& artifact, const pipeline::WindowSample& window) {
  const auto& spec = artifact.spec;
  if (window.features.rank() != 2 || window.features.rows() != spec.history_len ||
      window.features.cols() != kFeatureCount) {
    throw ShapeError("window features " + window.features.shape_string() + " do not match [" +
                     std::to_string(spec.history_len) + "x12]");
  }
  for (CameraView v : spec.views()) {
    const auto it = window.embeddings.find(v);
    if (it == window.embeddings.end()) {
      throw ConfigError(artifact.id() + " needs '" + std::string(to_string(v)) +
                        "' embeddings, window has none");
    }
    if (it->second.cols() != spec.embedding_dim) {
      throw ConfigError("embedding dimension mismatch for '" + std::string(to_string(v)) +
                        "': window has " + std::to_string(it->second.cols()) + ", artifact " +
                        std::to_string(spec.embedding_dim));
    }
  }
}

Predictor::Predictor(const ModelArtifact& artifact)
    : artifact_(artifact), model_(instantiate(artifact)) {}

nn::Tensor Predictor::predict(const pipeline::WindowSample& normalized) const {
  check_compatible(artifact_, normalized);
  nn::Tensor out = model_->predict(std::span(&normalized, 1));
  out.reshape({artifact_.spec.horizon_len, 2});
  return out;
}

nn::Tensor Predictor::predict_raw(std::span<const pipeline::WindowSample> raw) const {
  std::vector<pipeline::WindowSample> windows(raw.begin(), raw.end());
  for (const auto& w : windows) check_compatible(artifact_, w);
  pipeline::apply_normalizer(windows, artifact_.normalizer);
  return model_->predict(windows);
}

nn::Tensor predict(const ModelArtifact& artifact, const pipeline::WindowSample& normalized) {
  return Predictor(artifact).predict(normalized);
}

}  // namespace driveclone::models
