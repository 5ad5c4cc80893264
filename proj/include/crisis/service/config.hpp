#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crisis/corpus/types.hpp"

namespace crisis::service {

/// Ordered by capability: each role can do everything the previous one can.
enum class Role { contributor = 0, reviewer = 1, coordinator = 2 };
std::string_view to_string(Role r);
Role parse_role(std::string_view s);

struct Principal {
  std::string name;
  Role role = Role::contributor;
};

struct ServiceConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::filesystem::path store_path = "crisis-store";
  /// Bearer token -> principal. Config files may give a token as
  /// "env:NAME" to read it from the environment at load time.
  std::map<std::string, Principal> tokens;
  std::vector<std::string> cors_origins;
  std::vector<corpus::LanguagePair> pairs{{"en", "ga"}, {"ga", "en"}, {"en", "mr"}, {"mr", "en"}};
  /// A snapshot is written after every this many events; 0 disables.
  std::size_t snapshot_interval = 100;
  /// fdatasync after each appended event.
  bool sync_writes = true;
  std::optional<std::filesystem::path> baselines_path;
  std::optional<std::filesystem::path> runs_dir;

  static ServiceConfig from_json(const nlohmann::ordered_json& j, const std::filesystem::path& base_dir = {});
  /// Relative paths in the file resolve against its directory.
  static ServiceConfig load(const std::filesystem::path& path);
};

}  // namespace crisis::service
