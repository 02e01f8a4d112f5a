#include "output_stage.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <iterator>
#include <sstream>

#include "rfamado/error.hpp"
#include "usage_error.hpp"

namespace rfamado::cli {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[md[i] >> 4]);
    hex.push_back(kHex[md[i] & 0xF]);
  }
  return hex;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

void OutputStage::add_input(const fs::path& path) { input_paths_.push_back(path); }

void OutputStage::add_output(const fs::path& path, std::string content) {
  output_paths_.push_back(path);
  contents_.push_back(std::move(content));
}

void check_output_paths(const std::vector<fs::path>& paths) {
  for (const auto& p : paths) {
    if (p.empty()) continue;
    const fs::path parent = p.has_parent_path() ? p.parent_path() : fs::path(".");
    if (!fs::is_directory(parent))
      throw UsageError("output directory '" + parent.string() + "' does not exist");
    if (fs::is_directory(p)) throw UsageError("output '" + p.string() + "' is a directory");
  }
}

namespace {

void write_atomically(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".partial";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw DataError("write failed for '" + path.string() + "'");
    }
  }
  fs::rename(tmp, path);
}

}  // namespace

void OutputStage::commit(const fs::path& manifest, const nlohmann::json& config) const {
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& p : input_paths_)
    inputs.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
  nlohmann::json outputs = nlohmann::json::array();
  for (std::size_t i = 0; i < output_paths_.size(); ++i)
    outputs.push_back({{"path", output_paths_[i].string()}, {"sha256", sha256_hex(contents_[i])}});

  nlohmann::json doc;
  doc["tool"] = "rfamado";
  doc["version"] = RFAMADO_VERSION;
  doc["config"] = config;
  doc["inputs"] = std::move(inputs);
  doc["outputs"] = std::move(outputs);

  for (std::size_t i = 0; i < output_paths_.size(); ++i) write_atomically(output_paths_[i], contents_[i]);
  write_atomically(manifest, doc.dump(2) + "\n");
}

}  // namespace rfamado::cli
