#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rfamado::cli {

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);
/// Hex SHA-256 of a file's contents; throws DataError if unreadable.
std::string sha256_file(const std::filesystem::path& path);

/// Throws UsageError if an output path is a directory or its parent
/// directory is missing. Empty paths are skipped.
void check_output_paths(const std::vector<std::filesystem::path>& paths);

/// Collects every output of a command in memory and writes them together at
/// the end, so a failed run leaves nothing behind. Each file goes through a
/// temporary sibling and a rename.
class OutputStage {
 public:
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path, std::string content);

  /// Writes the outputs, then the manifest holding `config` and the SHA-256
  /// of every input and output.
  void commit(const std::filesystem::path& manifest, const nlohmann::json& config) const;

  const std::vector<std::filesystem::path>& outputs() const noexcept { return output_paths_; }

 private:
  std::vector<std::filesystem::path> input_paths_;
  std::vector<std::filesystem::path> output_paths_;
  std::vector<std::string> contents_;
};

}  // namespace rfamado::cli
