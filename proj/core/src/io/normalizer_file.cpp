#include "driveclone/io/normalizer_file.hpp"

#include "driveclone/io/tensor_file.hpp"
#include "json_codec.hpp"

namespace driveclone::io {

std::string normalizer_to_json(const pipeline::NormalizerStats& stats) {
  return detail::to_ojson(stats).dump(2) + "\n";
}

pipeline::NormalizerStats normalizer_from_json(std::string_view text) {
  return detail::guarded("normalizer", [&] {
    return detail::normalizer_from(nlohmann::json::parse(text));
  });
}

void save_normalizer(const std::filesystem::path& path, const pipeline::NormalizerStats& stats) {
  write_text_file(path, normalizer_to_json(stats));
}

pipeline::NormalizerStats load_normalizer(const std::filesystem::path& path) {
  return normalizer_from_json(read_text_file(path));
}

}  // namespace driveclone::io
