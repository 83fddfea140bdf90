#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "driveclone/pipeline.hpp"

namespace driveclone::io {

std::string normalizer_to_json(const pipeline::NormalizerStats& stats);
pipeline::NormalizerStats normalizer_from_json(std::string_view text);

void save_normalizer(const std::filesystem::path& path, const pipeline::NormalizerStats& stats);
pipeline::NormalizerStats load_normalizer(const std::filesystem::path& path);

}  // namespace driveclone::io
