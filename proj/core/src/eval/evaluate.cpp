#include "driveclone/eval/evaluate.hpp"

#include "driveclone/errors.hpp"

namespace driveclone::eval {

EvalReport evaluate(const models::ModelArtifact& artifact,
                    std::span<const pipeline::WindowSample> windows,
                    const std::string& dataset_id) {
  if (windows.empty()) throw ValidationError("evaluation set is empty");
  const models::Predictor predictor(artifact);
  return evaluate_predictions(windows, predictor.predict_raw(windows), artifact.id(), dataset_id);
}

}  // namespace driveclone::eval
