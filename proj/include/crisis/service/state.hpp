#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crisis/corpus/types.hpp"
#include "crisis/service/events.hpp"

namespace crisis::service {

struct SegmentEntry {
  corpus::Segment segment;
  std::string note;
  std::string reviewer;
  std::optional<Timestamp> reviewed_at;

  friend bool operator==(const SegmentEntry&, const SegmentEntry&) = default;
};

struct ExportEntry {
  std::string receipt_id;
  corpus::LanguagePair pair;
  std::string created_by;
  Timestamp created_at{};
  nlohmann::ordered_json options;
  nlohmann::ordered_json receipt;

  friend bool operator==(const ExportEntry&, const ExportEntry&) = default;
};

struct PairState {
  corpus::LanguagePair pair;
  corpus::CrisisPhase phase;
  /// Submission order.
  std::vector<std::string> segment_ids;

  friend bool operator==(const PairState&, const PairState&) = default;
};

struct PairStats {
  corpus::LanguagePair pair;
  corpus::CrisisPhase phase;
  corpus::CorpusStats counts;
  std::size_t contributors = 0;
  std::optional<Timestamp> last_submission_at;

  nlohmann::ordered_json to_json() const;
  friend bool operator==(const PairStats&, const PairStats&) = default;
};

/// Service state as a pure fold over the event log.
class State {
 public:
  explicit State(std::span<const corpus::LanguagePair> pairs = {});

  /// Throws ValidationError when `e` does not follow from this state: wrong
  /// sequence number, unknown pair or segment, forbidden status transition,
  /// phase past the last, or reused id.
  void check(const Event& e) const;
  /// check() then fold `e` in.
  void apply(const Event& e);

  /// Registers a pair at phase 1 if it is not known yet.
  void ensure_pair(const corpus::LanguagePair& pair) { pair_state(pair); }

  std::uint64_t last_seq() const noexcept { return last_seq_; }
  const std::map<std::string, PairState>& pairs() const noexcept { return pairs_; }
  const PairState* find_pair(std::string_view code) const;
  const SegmentEntry* find_segment(std::string_view id) const;
  const ExportEntry* find_export(std::string_view receipt_id) const;
  const std::map<std::string, ExportEntry>& exports() const noexcept { return exports_; }

  /// Earliest pending or accepted segment of the same pair sharing the
  /// candidate's dedup key.
  std::optional<std::string> live_duplicate(const corpus::Segment& candidate) const;

  /// Throws ValidationError for an unknown pair.
  PairStats stats(std::string_view pair_code) const;
  /// Segments of a pair in submission order, optionally filtered by status.
  std::vector<corpus::Segment> segments(std::string_view pair_code,
                                        std::optional<corpus::ReviewStatus> status = std::nullopt) const;

  nlohmann::ordered_json to_json() const;
  static State from_json(const nlohmann::ordered_json& j);

  friend bool operator==(const State&, const State&) = default;

 private:
  PairState& pair_state(const corpus::LanguagePair& pair);

  std::uint64_t last_seq_ = 0;
  std::map<std::string, PairState> pairs_;
  std::map<std::string, SegmentEntry> segments_;
  std::map<std::string, ExportEntry> exports_;
  /// pair + dedup key -> live ids in submission order.
  std::map<std::string, std::vector<std::string>> live_keys_;
};

/// Folds `events` over a fresh state seeded with `pairs`.
State replay(std::span<const corpus::LanguagePair> pairs, std::span<const Event> events);

}  // namespace crisis::service
