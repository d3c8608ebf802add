#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace attn::cli {

/// Reads a whole file; throws attn::Error(ParseError) naming the path when it
/// cannot be opened.
std::string read_input(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);

/// Collects outputs in memory and publishes them with write-to-temp plus
/// rename, so a failed run leaves nothing behind.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void add(std::string name, std::string content);
  std::vector<std::string> names() const;
  void commit() const;

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

/// Records the command, its resolved configuration, digests of every input
/// read and the outputs produced. Written last as run_manifest.json.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  void set_config(nlohmann::json config) { config_ = std::move(config); }
  std::string read(const std::filesystem::path& path);
  void finish(OutputSet& outputs) const;

 private:
  std::string command_;
  nlohmann::json config_ = nlohmann::json::object();
  nlohmann::json inputs_ = nlohmann::json::array();
  std::chrono::steady_clock::time_point start_;
};

}  // namespace attn::cli
