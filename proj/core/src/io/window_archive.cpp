#include "driveclone/io/window_archive.hpp"

#include <algorithm>

#include "json_codec.hpp"

namespace driveclone::io {
namespace {

// Stacks per-sample [a x b] tensors into [N, a, b].
nn::Tensor stack(const std::vector<pipeline::WindowSample>& ws, std::size_t a, std::size_t b,
                 const nn::Tensor& (*pick)(const pipeline::WindowSample&)) {
  nn::Tensor out({ws.size(), a, b});
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const nn::Tensor& t = pick(ws[i]);
    if (t.size() != a * b) {
      throw ShapeError("window " + ws[i].segment_id + "@" + std::to_string(ws[i].start_index) +
                       " has " + t.shape_string() + ", archive expects [" + std::to_string(a) +
                       "x" + std::to_string(b) + "]");
    }
    std::copy_n(t.raw(), a * b, out.raw() + i * a * b);
  }
  return out;
}

nn::Tensor unstack(const nn::Tensor& t, std::size_t i) {
  const std::size_t a = t.dim(1);
  const std::size_t b = t.dim(2);
  nn::Tensor out({a, b});
  std::copy_n(t.raw() + i * a * b, a * b, out.raw());
  return out;
}

}  // namespace

TensorFile encode_window_archive(const WindowArchive& archive) {
  const auto& ws = archive.windows;
  const std::size_t t = archive.config.history_len;
  const std::size_t s = archive.config.horizon_len;

  detail::ojson meta;
  meta["dataset_id"] = archive.dataset_id;
  meta["pipeline"] = detail::to_ojson(archive.config);
  auto samples = detail::ojson::array();
  for (const auto& w : ws) samples.push_back({w.segment_id, w.start_index});
  meta["samples"] = samples;

  TensorFile file;
  file.kind = "windows";
  file.tensors.emplace_back("features", stack(ws, t, kFeatureCount, [](const auto& w) -> const nn::Tensor& { return w.features; }));
  file.tensors.emplace_back("target", stack(ws, s, 2, [](const auto& w) -> const nn::Tensor& { return w.target; }));
  file.tensors.emplace_back("raw_target", stack(ws, s, 2, [](const auto& w) -> const nn::Tensor& { return w.raw_target; }));
  file.tensors.emplace_back("history_accel", stack(ws, t, 2, [](const auto& w) -> const nn::Tensor& { return w.history_accel; }));

  if (!ws.empty()) {
    for (const auto& [view, first] : ws.front().embeddings) {
      const std::size_t d = first.cols();
      nn::Tensor out({ws.size(), t, d});
      for (std::size_t i = 0; i < ws.size(); ++i) {
        const auto it = ws[i].embeddings.find(view);
        if (it == ws[i].embeddings.end() || it->second.size() != t * d) {
          throw ShapeError("window " + ws[i].segment_id + "@" + std::to_string(ws[i].start_index) +
                           " lacks consistent '" + std::string(to_string(view)) + "' embeddings");
        }
        std::copy_n(it->second.raw(), t * d, out.raw() + i * t * d);
      }
      file.tensors.emplace_back("embeddings/" + std::string(to_string(view)), std::move(out));
    }
  }
  file.meta_json = meta.dump();
  return file;
}

WindowArchive decode_window_archive(const TensorFile& file) {
  if (file.kind != "windows") throw IoError("expected a windows file, got '" + file.kind + "'");
  return detail::guarded("window archive", [&] {
    const auto meta = nlohmann::json::parse(file.meta_json);
    WindowArchive archive;
    archive.dataset_id = meta.at("dataset_id").get<std::string>();
    archive.config = detail::pipeline_config_from(meta.at("pipeline"));
    const auto& samples = meta.at("samples");
    const nn::Tensor& features = file.at("features");
    const nn::Tensor& target = file.at("target");
    const nn::Tensor& raw_target = file.at("raw_target");
    const nn::Tensor& history_accel = file.at("history_accel");
    const std::size_t n = samples.size();
    for (const nn::Tensor* t : {&features, &target, &raw_target, &history_accel}) {
      if (t->rank() != 3 || t->dim(0) != n) throw IoError("window archive tensor count mismatch");
    }
    archive.windows.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& w = archive.windows[i];
      w.segment_id = samples[i].at(0).get<std::string>();
      w.start_index = samples[i].at(1).get<std::size_t>();
      w.features = unstack(features, i);
      w.target = unstack(target, i);
      w.raw_target = unstack(raw_target, i);
      w.history_accel = unstack(history_accel, i);
    }
    const std::string prefix = "embeddings/";
    for (const auto& [name, t] : file.tensors) {
      if (name.rfind(prefix, 0) != 0) continue;
      const CameraView view = camera_view_from_string(name.substr(prefix.size()));
      if (t.rank() != 3 || t.dim(0) != n) throw IoError("embedding tensor " + name + " mismatch");
      for (std::size_t i = 0; i < n; ++i) archive.windows[i].embeddings[view] = unstack(t, i);
    }
    return archive;
  });
}

void save_window_archive(const std::filesystem::path& path, const WindowArchive& archive) {
  write_tensor_file(path, encode_window_archive(archive));
}

WindowArchive load_window_archive(const std::filesystem::path& path) {
  return decode_window_archive(read_tensor_file(path, "windows"));
}

}  // namespace driveclone::io
