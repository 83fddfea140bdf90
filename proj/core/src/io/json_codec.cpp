#include "json_codec.hpp"

namespace driveclone::io::detail {

ojson to_ojson(const pipeline::PipelineConfig& cfg) {
  ojson j;
  j["history_len"] = cfg.history_len;
  j["horizon_len"] = cfg.horizon_len;
  j["stride"] = cfg.stride;
  j["smooth_window"] = cfg.smooth_window;
  j["tolerance"] = cfg.detection.tolerance;
  j["max_range"] = cfg.detection.max_range;
  j["front_accel"] = std::string(pipeline::to_string(cfg.front_accel));
  return j;
}

pipeline::PipelineConfig pipeline_config_from(const nlohmann::json& j) {
  pipeline::PipelineConfig cfg;
  cfg.history_len = j.at("history_len").get<std::size_t>();
  cfg.horizon_len = j.at("horizon_len").get<std::size_t>();
  cfg.stride = j.at("stride").get<std::size_t>();
  cfg.smooth_window = j.at("smooth_window").get<std::size_t>();
  cfg.detection.tolerance = j.at("tolerance").get<double>();
  cfg.detection.max_range = j.at("max_range").get<double>();
  cfg.front_accel = pipeline::front_accel_source_from_string(j.at("front_accel").get<std::string>());
  return cfg;
}

ojson to_ojson(const nn::TrainConfig& cfg) {
  ojson j;
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["learning_rate"] = cfg.learning_rate;
  j["seed"] = cfg.seed;
  j["loss"] = std::string(nn::to_string(cfg.loss));
  j["early_stopping"] = cfg.early_stopping;
  j["patience"] = cfg.patience;
  return j;
}

nn::TrainConfig train_config_from(const nlohmann::json& j) {
  nn::TrainConfig cfg;
  cfg.epochs = j.at("epochs").get<std::size_t>();
  cfg.batch_size = j.at("batch_size").get<std::size_t>();
  cfg.learning_rate = j.at("learning_rate").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.loss = nn::loss_kind_from_string(j.at("loss").get<std::string>());
  cfg.early_stopping = j.at("early_stopping").get<bool>();
  cfg.patience = j.at("patience").get<std::size_t>();
  return cfg;
}

ojson to_ojson(const models::ArchitectureSpec& spec) {
  ojson j;
  j["variant"] = std::string(models::to_string(spec.variant));
  j["hidden"] = spec.hidden;
  j["mlp_hidden"] = spec.mlp_hidden;
  j["embedding_dim"] = spec.embedding_dim;
  j["history_len"] = spec.history_len;
  j["horizon_len"] = spec.horizon_len;
  j["ridge_lambdas"] = spec.ridge_lambdas;
  j["stacking_folds"] = spec.stacking_folds;
  auto views = ojson::array();
  for (CameraView v : spec.views()) views.push_back(std::string(to_string(v)));
  j["views"] = views;
  return j;
}

models::ArchitectureSpec architecture_spec_from(const nlohmann::json& j) {
  models::ArchitectureSpec spec;
  spec.variant = models::architecture_from_string(j.at("variant").get<std::string>());
  spec.hidden = j.at("hidden").get<std::size_t>();
  spec.mlp_hidden = j.at("mlp_hidden").get<std::vector<std::size_t>>();
  spec.embedding_dim = j.at("embedding_dim").get<std::size_t>();
  spec.history_len = j.at("history_len").get<std::size_t>();
  spec.horizon_len = j.at("horizon_len").get<std::size_t>();
  spec.ridge_lambdas = j.at("ridge_lambdas").get<std::vector<double>>();
  spec.stacking_folds = j.at("stacking_folds").get<std::size_t>();
  spec.validate();
  return spec;
}

ojson to_ojson(const pipeline::NormalizerStats& stats) {
  ojson j;
  j["features"] = std::vector<std::string>(kFeatureNames.begin(), kFeatureNames.end());
  j["mean"] = stats.mean;
  j["std"] = stats.std;
  return j;
}

pipeline::NormalizerStats normalizer_from(const nlohmann::json& j) {
  pipeline::NormalizerStats stats;
  stats.mean = j.at("mean").get<std::array<double, kFeatureCount>>();
  stats.std = j.at("std").get<std::array<double, kFeatureCount>>();
  stats.validate();
  return stats;
}

}  // namespace driveclone::io::detail
