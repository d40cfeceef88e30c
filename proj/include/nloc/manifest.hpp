#pragma once

// Run manifests: what was run, with which config, and digests of what it wrote.

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nloc/error.hpp"
#include "nloc/io.hpp"

namespace nloc::manifest {

constexpr const char* kToolVersion = "0.1.0";

inline std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) {
    throw IoError("sha256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int k = 0; k < len; ++k) {
    out += hex[md[k] >> 4];
    out += hex[md[k] & 15];
  }
  return out;
}

/// Writes to a sibling temporary file, then renames over the target.
inline void write_atomic(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  io::write_file(tmp, bytes);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move manifest into place at '" + path + "'");
  }
}

struct Output {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::string tool_version = kToolVersion;
  int dump_format_version = io::kDumpVersion;
  std::vector<Output> outputs;
  double wall_time = 0.0;

  /// Records a written file together with its digest.
  void add_output(const std::string& path) { outputs.push_back({path, sha256_hex(io::read_file(path))}); }

  nlohmann::json to_json() const {
    nlohmann::json outs = nlohmann::json::array();
    for (const auto& o : outputs) outs.push_back({{"path", o.path}, {"sha256", o.sha256}});
    return {{"command", command},
            {"config_hash", config_hash},
            {"versions", {{"tool", tool_version}, {"dump_format", dump_format_version}}},
            {"outputs", outs},
            {"wall_time", wall_time}};
  }

  void write(const std::string& path) const { write_atomic(path, to_json().dump(2) + "\n"); }
};

inline RunManifest read_manifest(const std::string& path) {
  const auto j = nlohmann::json::parse(io::read_file(path), nullptr, false);
  if (j.is_discarded()) throw IoError("manifest '" + path + "' is not valid JSON");
  RunManifest m;
  m.command = j.value("command", "");
  m.config_hash = j.value("config_hash", "");
  m.tool_version = j["versions"].value("tool", "");
  m.dump_format_version = j["versions"].value("dump_format", 0);
  for (const auto& o : j["outputs"]) m.outputs.push_back({o.value("path", ""), o.value("sha256", "")});
  m.wall_time = j.value("wall_time", 0.0);
  return m;
}

}  // namespace nloc::manifest
