#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "crisis/common/error.hpp"
#include "crisis/service/events.hpp"
#include "crisis/service/state.hpp"

namespace crisis::service {

/// The store cannot be trusted: a malformed line, a sequence gap, a
/// truncated tail, or an event that contradicts the state before it.
class RecoveryError : public Error {
 public:
  RecoveryError(const std::string& message, std::uint64_t first_bad_seq, std::uint64_t last_valid_seq)
      : Error(ErrorKind::io, message), first_bad_seq_(first_bad_seq), last_valid_seq_(last_valid_seq) {}

  std::uint64_t first_bad_seq() const noexcept { return first_bad_seq_; }
  std::uint64_t last_valid_seq() const noexcept { return last_valid_seq_; }

 private:
  std::uint64_t first_bad_seq_;
  std::uint64_t last_valid_seq_;
};

struct StoreOptions {
  std::size_t snapshot_interval = 100;
  bool sync_writes = true;
};

struct RecoveryInfo {
  std::uint64_t last_seq = 0;
  /// 0 when no usable snapshot was found.
  std::uint64_t snapshot_seq = 0;
  std::size_t events_replayed = 0;
  /// Why an existing snapshot was ignored, if it was.
  std::string snapshot_warning;
};

/// Parses and validates events.jsonl in `dir`. A missing log is empty.
std::vector<Event> read_event_log(const std::filesystem::path& dir);

/// Rebuilds state from `dir` without opening it for writing.
State recover(const std::filesystem::path& dir, std::span<const corpus::LanguagePair> pairs,
              RecoveryInfo* info = nullptr);

/// Directory layout: events.jsonl (append-only log), snapshot.json (latest
/// snapshot), exports/<receipt id>/ (immutable export artifacts).
/// Not thread-safe; callers serialize access.
class EventStore {
 public:
  EventStore(std::filesystem::path dir, std::span<const corpus::LanguagePair> pairs, StoreOptions options = {});
  ~EventStore();
  EventStore(const EventStore&) = delete;
  EventStore& operator=(const EventStore&) = delete;

  const State& state() const noexcept { return state_; }
  const RecoveryInfo& recovery() const noexcept { return recovery_; }

  /// Validates, persists, then applies the next event. Throws
  /// ValidationError when the event does not fit the current state and
  /// IoError when it cannot be written; the state is unchanged in both cases.
  const Event& append(EventKind kind, nlohmann::ordered_json payload, Timestamp at = now_utc());

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path log_path() const { return dir_ / "events.jsonl"; }
  std::filesystem::path snapshot_path() const { return dir_ / "snapshot.json"; }
  std::filesystem::path exports_dir() const { return dir_ / "exports"; }

  void write_snapshot();

 private:
  std::filesystem::path dir_;
  StoreOptions options_;
  State state_;
  RecoveryInfo recovery_;
  Event last_;
  int fd_ = -1;
};

}  // namespace crisis::service
