#include "driveclone/nn/train_config.hpp"

#include <cmath>

#include "driveclone/errors.hpp"

namespace driveclone::nn {

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate must be > 0");
  }
  if (early_stopping && patience < 1) throw ConfigError("patience must be >= 1");
}

}  // namespace driveclone::nn
