#include "driveclone/eval/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "io/json_codec.hpp"
#include "driveclone/errors.hpp"

namespace driveclone::eval {

EvalReport evaluate_predictions(std::span<const pipeline::WindowSample> windows,
                                const nn::Tensor& pred, std::string model_id,
                                std::string dataset_id) {
  if (windows.empty()) throw ValidationError("evaluation set is empty");
  const std::size_t s = windows.front().horizon_len();
  if (pred.rank() != 3 || pred.dim(0) != windows.size() || pred.dim(1) != s || pred.dim(2) != 2) {
    throw ShapeError("predictions " + pred.shape_string() + " do not match " +
                     std::to_string(windows.size()) + " windows of horizon " + std::to_string(s));
  }

  struct Sums {
    std::size_t windows = 0;
    double x = 0.0, y = 0.0, rx = 0.0, ry = 0.0;
  };
  std::map<std::string, Sums> per_clip;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    if (w.horizon_len() != s) throw ShapeError("windows have differing horizons");
    auto& acc = per_clip[w.segment_id];
    ++acc.windows;
    for (std::size_t t = 0; t < s; ++t) {
      const double px = pred[(i * s + t) * 2];
      const double py = pred[(i * s + t) * 2 + 1];
      acc.x += std::abs(px - w.target(t, 0));
      acc.y += std::abs(py - w.target(t, 1));
      if (!w.raw_target.empty()) {
        acc.rx += std::abs(px - w.raw_target(t, 0));
        acc.ry += std::abs(py - w.raw_target(t, 1));
      }
    }
  }

  EvalReport report;
  report.model_id = std::move(model_id);
  report.dataset_id = std::move(dataset_id);
  for (const auto& [id, acc] : per_clip) {
    const double n = static_cast<double>(acc.windows * s);
    report.clips.push_back({id, acc.windows, acc.x / n, acc.y / n, acc.rx / n, acc.ry / n});
  }
  aggregate(report);
  return report;
}

void aggregate(EvalReport& report) {
  std::sort(report.clips.begin(), report.clips.end(),
            [](const ClipMae& a, const ClipMae& b) { return a.segment_id < b.segment_id; });
  double x = 0.0, y = 0.0, rx = 0.0, ry = 0.0;
  for (const auto& c : report.clips) {
    x += c.mae_x;
    y += c.mae_y;
    rx += c.raw_mae_x;
    ry += c.raw_mae_y;
  }
  const double n = report.clips.empty() ? 1.0 : static_cast<double>(report.clips.size());
  report.mae_x = x / n;
  report.mae_y = y / n;
  report.raw_mae_x = rx / n;
  report.raw_mae_y = ry / n;
}

nn::Tensor zero_predictions(std::span<const pipeline::WindowSample> windows) {
  const std::size_t s = windows.empty() ? 0 : windows.front().horizon_len();
  return nn::Tensor({windows.size(), s, 2});
}

nn::Tensor persistence_predictions(std::span<const pipeline::WindowSample> windows) {
  nn::Tensor out = zero_predictions(windows);
  const std::size_t s = out.dim(1);
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& h = windows[i].history_accel;
    const std::size_t last = h.rows() - 1;
    for (std::size_t t = 0; t < s; ++t) {
      out[(i * s + t) * 2] = h(last, 0);
      out[(i * s + t) * 2 + 1] = h(last, 1);
    }
  }
  return out;
}

std::string report_to_json(const EvalReport& report) {
  io::detail::ojson j;
  j["model_id"] = report.model_id;
  j["dataset_id"] = report.dataset_id;
  j["clip_count"] = report.clip_count();
  j["mae_x"] = report.mae_x;
  j["mae_y"] = report.mae_y;
  j["raw_mae_x"] = report.raw_mae_x;
  j["raw_mae_y"] = report.raw_mae_y;
  auto clips = io::detail::ojson::array();
  for (const auto& c : report.clips) {
    clips.push_back({{"segment_id", c.segment_id},
                     {"windows", c.windows},
                     {"mae_x", c.mae_x},
                     {"mae_y", c.mae_y},
                     {"raw_mae_x", c.raw_mae_x},
                     {"raw_mae_y", c.raw_mae_y}});
  }
  j["clips"] = clips;
  return j.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
  return io::detail::guarded("report", [&] {
    const auto j = nlohmann::json::parse(text);
    EvalReport r;
    r.model_id = j.at("model_id").get<std::string>();
    r.dataset_id = j.at("dataset_id").get<std::string>();
    for (const auto& c : j.at("clips")) {
      r.clips.push_back({c.at("segment_id").get<std::string>(), c.at("windows").get<std::size_t>(),
                         c.at("mae_x").get<double>(), c.at("mae_y").get<double>(),
                         c.at("raw_mae_x").get<double>(), c.at("raw_mae_y").get<double>()});
    }
    aggregate(r);
    return r;
  });
}

}  // namespace driveclone::eval
