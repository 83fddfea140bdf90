#include "driveclone/models/gradcheck.hpp"

#include <numeric>

#include "driveclone/errors.hpp"
#include "driveclone/models/training.hpp"
#include "driveclone/nn/rng.hpp"

namespace driveclone::models {

std::vector<pipeline::WindowSample> random_windows(const TinyModelConfig& cfg) {
  nn::Rng rng(nn::mix_seed(cfg.seed, 7));
  auto draw = [&](std::size_t r, std::size_t c) {
    nn::Tensor t({r, c});
    for (double& v : t.data()) v = rng.normal();
    return t;
  };
  std::vector<pipeline::WindowSample> out(cfg.batch);
  for (std::size_t i = 0; i < cfg.batch; ++i) {
    auto& w = out[i];
    w.segment_id = "tiny-" + std::to_string(i);
    w.features = draw(cfg.history, kFeatureCount);
    for (CameraView v : kAllCameraViews) w.embeddings[v] = draw(cfg.history, cfg.embedding_dim);
    w.target = draw(cfg.horizon, 2);
    w.raw_target = w.target;
    w.history_accel = draw(cfg.history, 2);
  }
  return out;
}

nn::GradCheckReport check_gradients(Architecture variant, const TinyModelConfig& cfg, double eps,
                                    double tol) {
  ArchitectureSpec spec = ArchitectureSpec::for_variant(variant, cfg.embedding_dim);
  spec.hidden = cfg.hidden;
  spec.history_len = cfg.history;
  spec.horizon_len = cfg.horizon;
  auto model = build_model(spec, cfg.seed);
  auto* diff = dynamic_cast<DifferentiableModel*>(model.get());
  if (diff == nullptr) {
    throw ConfigError(std::string(to_string(variant)) + " has no analytic gradients to check");
  }
  const auto windows = random_windows(cfg);
  std::vector<std::size_t> idx(windows.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const auto views = spec.views();
  const WindowBatch batch = WindowBatch::gather(windows, idx, views, spec.embedding_dim);

  std::vector<nn::Tensor> grads;
  diff->loss_and_gradients(batch, nn::LossKind::mse, grads);
  const auto loss_fn = [&] { return nn::loss(diff->forward(batch), batch.target, nn::LossKind::mse); };
  return nn::grad_check(model->parameters(), grads, loss_fn, eps, tol);
}

}  // namespace driveclone::models
