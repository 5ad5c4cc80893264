#include "crisis/service/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "crisis/corpus/io.hpp"

namespace crisis::service {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

std::vector<Event> read_event_log(const fs::path& dir) {
  std::vector<Event> events;
  const auto path = dir / "events.jsonl";
  std::error_code ec;
  if (!fs::exists(path, ec)) return events;
  const std::string content = corpus::read_file(path);
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    ++line_no;
    const auto end = content.find('\n', pos);
    const std::uint64_t expected = events.size() + 1;
    const std::uint64_t last_valid = events.size();
    if (end == std::string::npos) {
      throw RecoveryError("event log " + path.string() + ": truncated final line " + std::to_string(line_no) +
                              "; last valid sequence " + std::to_string(last_valid),
                          expected, last_valid);
    }
    const std::string_view line(content.data() + pos, end - pos);
    pos = end + 1;
    Event e;
    try {
      e = event_from_json(Json::parse(line));
    } catch (const std::exception& ex) {
      throw RecoveryError("event log " + path.string() + ": line " + std::to_string(line_no) +
                              " is corrupt (first bad sequence " + std::to_string(expected) +
                              ", last valid sequence " + std::to_string(last_valid) + "): " + ex.what(),
                          expected, last_valid);
    }
    if (e.seq != expected) {
      throw RecoveryError("event log " + path.string() + ": line " + std::to_string(line_no) + " has sequence " +
                              std::to_string(e.seq) + ", expected " + std::to_string(expected) +
                              " (last valid sequence " + std::to_string(last_valid) + ")",
                          expected, last_valid);
    }
    events.push_back(std::move(e));
  }
  return events;
}

namespace {

void fold_into(State& st, std::span<const Event> events) {
  for (const auto& e : events) {
    try {
      st.apply(e);
    } catch (const ValidationError& ex) {
      throw RecoveryError("event " + std::to_string(e.seq) + " is inconsistent with the log before it: " + ex.what(),
                          e.seq, e.seq - 1);
    }
  }
}

}  // namespace

State recover(const fs::path& dir, std::span<const corpus::LanguagePair> pairs, RecoveryInfo* info) {
  const auto events = read_event_log(dir);
  RecoveryInfo local;
  local.last_seq = events.size();
  State st(pairs);
  std::size_t start = 0;
  const auto snapshot = dir / "snapshot.json";
  std::error_code ec;
  if (fs::exists(snapshot, ec)) {
    try {
      const Json j = Json::parse(corpus::read_file(snapshot));
      State snap = State::from_json(j.at("state"));
      const auto seq = j.at("seq").get<std::uint64_t>();
      if (snap.last_seq() != seq) throw ParseError("snapshot sequence disagrees with its state");
      if (seq > events.size()) {
        throw RecoveryError("snapshot at sequence " + std::to_string(seq) + " is ahead of the event log (last " +
                                std::to_string(events.size()) + ")",
                            events.size() + 1, events.size());
      }
      for (const auto& p : pairs) snap.ensure_pair(p);
      st = std::move(snap);
      start = seq;
      local.snapshot_seq = seq;
    } catch (const RecoveryError&) {
      throw;
    } catch (const std::exception& ex) {
      local.snapshot_warning = std::string("ignored unreadable snapshot: ") + ex.what();
    }
  }
  fold_into(st, std::span<const Event>(events).subspan(start));
  local.events_replayed = events.size() - start;
  if (info != nullptr) *info = local;
  return st;
}

EventStore::EventStore(fs::path dir, std::span<const corpus::LanguagePair> pairs, StoreOptions options)
    : dir_(std::move(dir)), options_(options) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create store " + dir_.string() + ": " + ec.message());
  fs::create_directories(exports_dir(), ec);
  if (ec) throw IoError("cannot create " + exports_dir().string() + ": " + ec.message());
  fd_ = ::open(log_path().c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw IoError("cannot open " + log_path().string() + ": " + std::strerror(errno));
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw IoError("store " + dir_.string() + " is in use by another process");
  }
  try {
    state_ = recover(dir_, pairs, &recovery_);
  } catch (...) {
    ::close(fd_);
    fd_ = -1;
    throw;
  }
}

EventStore::~EventStore() {
  if (fd_ >= 0) ::close(fd_);
}

const Event& EventStore::append(EventKind kind, Json payload, Timestamp at) {
  Event e{state_.last_seq() + 1, kind, at, std::move(payload)};
  state_.check(e);
  const std::string line = event_to_json(e).dump() + "\n";
  std::size_t written = 0;
  while (written < line.size()) {
    const auto n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("cannot append to " + log_path().string() + ": " + std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }
  if (options_.sync_writes && ::fdatasync(fd_) != 0) {
    throw IoError("cannot sync " + log_path().string() + ": " + std::strerror(errno));
  }
  state_.apply(e);
  last_ = std::move(e);
  if (options_.snapshot_interval > 0 && state_.last_seq() % options_.snapshot_interval == 0) write_snapshot();
  return last_;
}

void EventStore::write_snapshot() {
  Json j;
  j["seq"] = state_.last_seq();
  j["state"] = state_.to_json();
  corpus::write_file(snapshot_path(), j.dump() + "\n");
}

}  // namespace crisis::service
