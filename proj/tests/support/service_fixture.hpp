#pragma once

#include <filesystem>

#include "crisis/service/config.hpp"

namespace crisis::testing {

inline service::ServiceConfig service_config(const std::filesystem::path& store) {
  service::ServiceConfig cfg;
  cfg.store_path = store;
  cfg.tokens = {{"tok-contrib", {"alice", service::Role::contributor}},
                {"tok-contrib2", {"dara", service::Role::contributor}},
                {"tok-review", {"bob", service::Role::reviewer}},
                {"tok-coord", {"carol", service::Role::coordinator}}};
  cfg.cors_origins = {"http://localhost:5173"};
  cfg.snapshot_interval = 25;
  cfg.sync_writes = false;
  return cfg;
}

}  // namespace crisis::testing
