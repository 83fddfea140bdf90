#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "driveclone/io/tensor_file.hpp"
#include "driveclone/pipeline.hpp"

namespace driveclone::io {

/// Windowed dataset on disk, stored as a tensor file of kind "windows":
/// features [N, T, 12], target and raw_target [N, S, 2], history_accel
/// [N, T, 2] and one embeddings/<view> [N, T, D] per camera view. The meta
/// block records the pipeline config and each sample's segment id and start
/// frame. Features are stored unnormalized.
struct WindowArchive {
  pipeline::PipelineConfig config;
  std::string dataset_id;
  std::vector<pipeline::WindowSample> windows;
};

TensorFile encode_window_archive(const WindowArchive& archive);
WindowArchive decode_window_archive(const TensorFile& file);

void save_window_archive(const std::filesystem::path& path, const WindowArchive& archive);
WindowArchive load_window_archive(const std::filesystem::path& path);

}  // namespace driveclone::io
