#include "crisis/service/config.hpp"

#include <cstdlib>

#include "crisis/common/error.hpp"
#include "crisis/corpus/io.hpp"

namespace crisis::service {

using Json = nlohmann::ordered_json;

std::string_view to_string(Role r) {
  switch (r) {
    case Role::contributor: return "contributor";
    case Role::reviewer: return "reviewer";
    case Role::coordinator: return "coordinator";
  }
  return "contributor";
}

Role parse_role(std::string_view s) {
  for (Role r : {Role::contributor, Role::reviewer, Role::coordinator}) {
    if (to_string(r) == s) return r;
  }
  throw ValidationError("unknown role '" + std::string(s) + "'");
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

std::string resolve_token(const std::string& token) {
  if (!token.starts_with("env:")) return token;
  const std::string var = token.substr(4);
  const char* value = std::getenv(var.c_str());
  if (value == nullptr || *value == '\0') throw ValidationError("token variable " + var + " is not set");
  return value;
}

}  // namespace

ServiceConfig ServiceConfig::from_json(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ParseError("service config must be a JSON object");
  ServiceConfig cfg;
  try {
    if (auto it = j.find("listen_host"); it != j.end()) cfg.listen_host = it->get<std::string>();
    if (auto it = j.find("listen_port"); it != j.end()) cfg.listen_port = it->get<int>();
    if (auto it = j.find("store_path"); it != j.end()) cfg.store_path = resolve(base_dir, it->get<std::string>());
    if (auto it = j.find("tokens"); it != j.end()) {
      for (const auto& entry : *it) {
        Principal p{entry.at("name").get<std::string>(), parse_role(entry.at("role").get<std::string>())};
        const std::string token = resolve_token(entry.at("token").get<std::string>());
        if (token.empty()) throw ValidationError("empty token for " + p.name);
        if (!cfg.tokens.emplace(token, p).second) throw ValidationError("duplicate token for " + p.name);
      }
    }
    if (auto it = j.find("cors_origins"); it != j.end()) cfg.cors_origins = it->get<std::vector<std::string>>();
    if (auto it = j.find("pairs"); it != j.end()) {
      cfg.pairs.clear();
      for (const auto& p : *it) cfg.pairs.push_back(corpus::LanguagePair::parse(p.get<std::string>()));
    }
    if (auto it = j.find("snapshot_interval"); it != j.end()) cfg.snapshot_interval = it->get<std::size_t>();
    if (auto it = j.find("sync_writes"); it != j.end()) cfg.sync_writes = it->get<bool>();
    if (auto it = j.find("baselines_path"); it != j.end()) {
      cfg.baselines_path = resolve(base_dir, it->get<std::string>());
    }
    if (auto it = j.find("runs_dir"); it != j.end()) cfg.runs_dir = resolve(base_dir, it->get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed service config: ") + e.what());
  }
  if (cfg.listen_port < 0 || cfg.listen_port > 65535) throw ValidationError("listen_port out of range");
  return cfg;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
  const std::string text = corpus::read_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

}  // namespace crisis::service
