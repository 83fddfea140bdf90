#pragma once

// nlohmann adapters for configuration records. Private to the library.

#include <json.hpp>

#include "driveclone/errors.hpp"
#include "driveclone/models/architecture.hpp"
#include "driveclone/nn/train_config.hpp"
#include "driveclone/pipeline.hpp"

namespace driveclone::io::detail {

using ojson = nlohmann::ordered_json;

ojson to_ojson(const pipeline::PipelineConfig& cfg);
pipeline::PipelineConfig pipeline_config_from(const nlohmann::json& j);

ojson to_ojson(const nn::TrainConfig& cfg);
nn::TrainConfig train_config_from(const nlohmann::json& j);

ojson to_ojson(const models::ArchitectureSpec& spec);
models::ArchitectureSpec architecture_spec_from(const nlohmann::json& j);

ojson to_ojson(const pipeline::NormalizerStats& stats);
pipeline::NormalizerStats normalizer_from(const nlohmann::json& j);

/// Runs `fn`, turning nlohmann exceptions into IoError prefixed by `what`.
template <class Fn>
auto guarded(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string(what) + ": " + e.what());
  }
}

}  // namespace driveclone::io::detail
