#pragma once

#include <span>
#include <string>

#include "driveclone/eval/protocol.hpp"
#include "driveclone/models/artifact.hpp"

namespace driveclone::eval {

/// Per-clip MAE of the artifact's predictions on raw validation windows.
EvalReport evaluate(const models::ModelArtifact& artifact,
                    std::span<const pipeline::WindowSample> windows,
                    const std::string& dataset_id = {});

}  // namespace driveclone::eval
