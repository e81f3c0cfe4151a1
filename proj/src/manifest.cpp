#include "lexfp/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <iterator>
#include <memory>

#include "lexfp/error.hpp"

namespace lexfp {
namespace {

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

std::string sidecar_json(const std::filesystem::path& path, std::string_view content, const RunManifest& manifest) {
  nlohmann::json j = manifest.to_json();
  j["output"] = path.filename().string();
  j["output_sha256"] = sha256_hex(content);
  return j.dump(2) + "\n";
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

void RunManifest::add_input(const std::filesystem::path& path) {
  inputs.push_back({{"path", path.string()}, {"sha256", sha256_file(path)}});
}

nlohmann::json RunManifest::to_json() const {
  return {{"tool", "lexfp"},
          {"version", std::string(kToolVersion)},
          {"command", command},
          {"inputs", inputs},
          {"parameters", parameters},
          {"notes", notes}};
}

OutputWriter::OutputWriter(std::filesystem::path dir, RunManifest manifest)
    : dir_(std::move(dir)), manifest_(std::move(manifest)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
}

void OutputWriter::write(const std::string& name, std::string_view content) {
  const auto path = dir_ / name;
  const auto sidecar = dir_ / (name + ".manifest.json");
  written_.push_back(path);
  write_file(path, content);
  written_.push_back(sidecar);
  write_file(sidecar, sidecar_json(path, content, manifest_));
}

void OutputWriter::rollback() {
  for (const auto& p : written_) {
    std::error_code ec;
    std::filesystem::remove(p, ec);
  }
  written_.clear();
}

void write_with_manifest(const std::filesystem::path& path, std::string_view content, const RunManifest& manifest) {
  write_file(path, content);
  write_file(path.string() + ".manifest.json", sidecar_json(path, content, manifest));
}

}  // namespace lexfp
