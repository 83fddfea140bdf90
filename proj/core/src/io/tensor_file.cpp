#include "driveclone/io/tensor_file.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "driveclone/errors.hpp"

namespace driveclone::io {
namespace {

constexpr char kMagic[8] = {'D', 'R', 'V', 'C', 'L', 'O', 'N', 'E'};

template <class T>
void put_le(std::string& out, T value) {
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  out.append(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw IoError("tensor file truncated");
  unsigned char buf[sizeof(T)];
  std::memcpy(buf, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  pos += sizeof(T);
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

}  // namespace

const nn::Tensor* TensorFile::find(const std::string& name) const {
  for (const auto& [n, t] : tensors) {
    if (n == name) return &t;
  }
  return nullptr;
}

const nn::Tensor& TensorFile::at(const std::string& name) const {
  const nn::Tensor* t = find(name);
  if (t == nullptr) throw IoError("tensor '" + name + "' missing from " + kind + " file");
  return *t;
}

std::string encode_tensor_file(const TensorFile& file) {
  nlohmann::ordered_json header;
  header["kind"] = file.kind;
  header["dtype"] = "float64-le";
  auto& list = header["tensors"] = nlohmann::ordered_json::array();
  for (const auto& [name, t] : file.tensors) {
    list.push_back({{"name", name}, {"shape", t.shape()}});
  }
  header["meta"] = nlohmann::ordered_json::parse(file.meta_json);
  const std::string text = header.dump();

  std::string out(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(out, kContainerVersion);
  put_le<std::uint64_t>(out, text.size());
  out += text;
  for (const auto& [name, t] : file.tensors) {
    for (double v : t.data()) put_le<double>(out, v);
  }
  return out;
}

TensorFile decode_tensor_file(const std::string& bytes) {
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw IoError("not a driveclone tensor file (bad magic)");
  }
  std::size_t pos = sizeof kMagic;
  const auto version = get_le<std::uint32_t>(bytes, pos);
  if (version != kContainerVersion) {
    throw IoError("unsupported tensor file version " + std::to_string(version));
  }
  const auto header_len = get_le<std::uint64_t>(bytes, pos);
  if (pos + header_len > bytes.size()) throw IoError("tensor file truncated in header");
  nlohmann::ordered_json header;
  try {
    header = nlohmann::ordered_json::parse(bytes.substr(pos, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("tensor file header: ") + e.what());
  }
  pos += header_len;

  TensorFile file;
  try {
    file.kind = header.at("kind").get<std::string>();
    if (header.at("dtype").get<std::string>() != "float64-le") {
      throw IoError("unsupported dtype " + header.at("dtype").dump());
    }
    file.meta_json = header.at("meta").dump();
    for (const auto& entry : header.at("tensors")) {
      auto shape = entry.at("shape").get<std::vector<std::size_t>>();
      nn::Tensor t(shape);
      for (double& v : t.data()) v = get_le<double>(bytes, pos);
      file.tensors.emplace_back(entry.at("name").get<std::string>(), std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("tensor file header: ") + e.what());
  }
  if (pos != bytes.size()) throw IoError("tensor file has trailing bytes");
  return file;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

void write_tensor_file(const std::filesystem::path& path, const TensorFile& file) {
  write_text_file(path, encode_tensor_file(file));
}

TensorFile read_tensor_file(const std::filesystem::path& path, const std::string& expected_kind) {
  TensorFile file = decode_tensor_file(read_text_file(path));
  if (!expected_kind.empty() && file.kind != expected_kind) {
    throw IoError(path.string() + " holds a '" + file.kind + "' file, expected '" +
                  expected_kind + "'");
  }
  return file;
}

}  // namespace driveclone::io
