#include "output.hpp"

#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include <openssl/evp.h>

#include "attn/error.hpp"

namespace attn::cli {

namespace fs = std::filesystem;

std::string read_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

void OutputSet::add(std::string name, std::string content) {
  files_.emplace_back(std::move(name), std::move(content));
}

std::vector<std::string> OutputSet::names() const {
  std::vector<std::string> out;
  for (const auto& f : files_) out.push_back(f.first);
  return out;
}

void OutputSet::commit() const {
  fs::create_directories(dir_);
  const std::string suffix = ".tmp." + std::to_string(::getpid());
  std::vector<fs::path> temps;
  try {
    for (const auto& [name, content] : files_) {
      fs::path tmp = dir_ / ("." + name + suffix);
      temps.push_back(tmp);
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      out.close();
      if (!out) throw std::runtime_error("failed writing " + tmp.string());
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
    throw;
  }
  for (std::size_t i = 0; i < files_.size(); ++i) fs::rename(temps[i], dir_ / files_[i].first);
}

RunManifest::RunManifest(std::string command)
    : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

std::string RunManifest::read(const fs::path& path) {
  std::string bytes = read_input(path);
  inputs_.push_back({{"path", path.string()}, {"bytes", bytes.size()}, {"sha256", sha256_hex(bytes)}});
  return bytes;
}

void RunManifest::finish(OutputSet& outputs) const {
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  nlohmann::json j{{"command", command_},
                   {"config", config_},
                   {"inputs", inputs_},
                   {"outputs", outputs.names()},
                   {"wall_clock_seconds", elapsed}};
  outputs.add("run_manifest.json", j.dump(2) + "\n");
}

}  // namespace attn::cli
