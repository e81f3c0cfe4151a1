#pragma once
// Run manifests and the output writer that attaches one to every file it produces.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace lexfp {

inline constexpr std::string_view kToolVersion = "0.1.0";

std::string sha256_hex(std::string_view bytes);
/// Throws IoError when the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

struct RunManifest {
  std::string command;
  nlohmann::json inputs = nlohmann::json::array();  // [{"path", "sha256"}]
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json notes = nlohmann::json::object();

  void add_input(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

/// Writes named outputs under a directory, each with a `<name>.manifest.json`
/// sidecar. rollback() removes everything written so far.
class OutputWriter {
 public:
  OutputWriter(std::filesystem::path dir, RunManifest manifest);

  void write(const std::string& name, std::string_view content);
  void rollback();
  const std::vector<std::filesystem::path>& written() const { return written_; }

 private:
  std::filesystem::path dir_;
  RunManifest manifest_;
  std::vector<std::filesystem::path> written_;
};

/// Writes `content` to `path` and a sidecar next to it.
void write_with_manifest(const std::filesystem::path& path, std::string_view content, const RunManifest& manifest);

}  // namespace lexfp
