#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "driveclone/nn/tensor.hpp"

namespace driveclone::io {

/// Binary container of named float64 tensors plus a JSON metadata block.
///
/// Layout: the 8 bytes "DRVCLONE", a little-endian u32 container version, a
/// little-endian u64 header length, the UTF-8 JSON header, then every tensor's
/// data as little-endian IEEE-754 doubles in header order. The header lists
/// kind, dtype ("float64-le"), each tensor's name and shape, and `meta`.
struct TensorFile {
  std::string kind;
  std::string meta_json = "{}";
  std::vector<std::pair<std::string, nn::Tensor>> tensors;

  const nn::Tensor* find(const std::string& name) const;
  /// Throws IoError naming the missing tensor.
  const nn::Tensor& at(const std::string& name) const;
};

inline constexpr std::uint32_t kContainerVersion = 1;

std::string encode_tensor_file(const TensorFile& file);
/// Throws IoError on bad magic, version, truncation or a malformed header.
TensorFile decode_tensor_file(const std::string& bytes);

void write_tensor_file(const std::filesystem::path& path, const TensorFile& file);
/// `expected_kind` non-empty: the stored kind must match.
TensorFile read_tensor_file(const std::filesystem::path& path, const std::string& expected_kind = {});

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace driveclone::io
