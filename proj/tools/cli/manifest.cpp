#include "cli/manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>

#include "polariton/errors.hpp"
#include "polariton/format.hpp"

namespace polariton::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw IoError("sha256 initialization failed");
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);

  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  nlohmann::json artifacts = nlohmann::json::array();
  for (const auto& a : m.artifacts) artifacts.push_back({{"path", a.path}, {"sha256", a.sha256}});
  const nlohmann::json doc{
      {"command", m.command},
      {"tool_version", m.tool_version},
      {"output_directory", m.output_directory},
      {"config_text", m.config_text},
      {"flags", m.flags},
      {"resolved_config", m.resolved_config},
      {"artifacts", artifacts},
      {"wall_clock_seconds", m.wall_clock_seconds},
  };
  const auto path = dir / manifest_name;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_json(out, doc);
  if (!out) throw IoError("write failed: " + path.string());
}

RunManifest read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / manifest_name;
  std::ifstream in(path);
  if (!in) throw IoError("no manifest at " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
    RunManifest m;
    m.command = doc.at("command").get<std::string>();
    m.tool_version = doc.at("tool_version").get<std::string>();
    m.output_directory = doc.at("output_directory").get<std::string>();
    m.config_text = doc.at("config_text").get<std::string>();
    m.flags = doc.at("flags");
    m.resolved_config = doc.at("resolved_config");
    for (const auto& a : doc.at("artifacts"))
      m.artifacts.push_back({a.at("path").get<std::string>(), a.at("sha256").get<std::string>()});
    m.wall_clock_seconds = doc.at("wall_clock_seconds").get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest " + path.string() + ": " + e.what());
  }
}

std::vector<std::string> verify_artifacts(const std::filesystem::path& dir,
                                          const RunManifest& manifest) {
  std::vector<std::string> bad;
  for (const auto& a : manifest.artifacts) {
    const auto path = dir / a.path;
    if (!std::filesystem::exists(path) || sha256_file(path) != a.sha256) bad.push_back(a.path);
  }
  return bad;
}

}  // namespace polariton::cli
