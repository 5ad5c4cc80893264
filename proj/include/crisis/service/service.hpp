#pragma once

#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crisis/corpus/io.hpp"
#include "crisis/eval/leaderboard.hpp"
#include "crisis/service/config.hpp"
#include "crisis/service/state.hpp"
#include "crisis/service/store.hpp"

namespace crisis::service {

/// A request-level failure with its HTTP status and machine-readable code.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, std::string code, const std::string& message,
           nlohmann::ordered_json details = nlohmann::ordered_json::object())
      : std::runtime_error(message), status_(status), code_(std::move(code)), details_(std::move(details)) {}

  int status() const noexcept { return status_; }
  const std::string& code() const noexcept { return code_; }
  const nlohmann::ordered_json& details() const noexcept { return details_; }

  /// {"error": code, "message": ..., plus any details}.
  nlohmann::ordered_json to_json() const;

 private:
  int status_;
  std::string code_;
  nlohmann::ordered_json details_;
};

struct SubmitRequest {
  std::string source_text;
  std::string target_text;
  corpus::Stream stream = corpus::Stream::community;
};

struct ExportOptions {
  bool dedup = false;
  std::optional<corpus::SplitRatios> ratios;
  std::uint64_t seed = 0;
  corpus::ExportFormat format = corpus::ExportFormat::jsonl;

  nlohmann::ordered_json to_json() const;
  /// Missing keys keep defaults. Throws ValidationError on bad values.
  static ExportOptions from_json(const nlohmann::ordered_json& j);
};

nlohmann::ordered_json segment_entry_to_json(const SegmentEntry& entry);
/// Receipt as served over HTTP, with download URLs.
nlohmann::ordered_json export_entry_to_json(const ExportEntry& entry);

/// Corpus collection service. Every mutation is validated against the
/// current state, appended to the event log, then folded into the state
/// under one exclusive lock; reads share a lock and see a consistent state.
class CorpusService {
 public:
  explicit CorpusService(ServiceConfig cfg);

  const ServiceConfig& config() const noexcept { return cfg_; }
  RecoveryInfo recovery() const;

  /// 401 for an unknown or missing token.
  Principal authenticate(std::string_view token) const;

  /// Returns the new segment id. 422 on empty text or unknown pair, 409 with
  /// "existing_id" when a pending or accepted segment has the same dedup key.
  std::string submit_segment(const Principal& who, std::string_view pair_code, const SubmitRequest& req);
  SegmentEntry review_segment(const Principal& who, std::string_view id, std::string_view verdict,
                              std::string note);
  corpus::CrisisPhase advance_phase(const Principal& who, std::string_view pair_code);
  ExportEntry create_export(const Principal& who, std::string_view pair_code, const ExportOptions& options);

  /// Appends imported segments as they are, without the duplicate check.
  /// Throws ValidationError on an id that already exists.
  std::size_t import_segments(const corpus::Corpus& corpus);

  PairStats stats(std::string_view pair_code) const;
  std::vector<corpus::Segment> list_segments(std::string_view pair_code,
                                             std::optional<corpus::ReviewStatus> status) const;
  SegmentEntry get_segment(std::string_view id) const;
  ExportEntry get_export(std::string_view receipt_id) const;
  /// Bytes of one exported file; verified against the receipt checksum.
  std::string export_file(std::string_view receipt_id, std::string_view file_name) const;
  std::vector<PairState> pairs() const;
  /// Published baselines plus local runs for a direction. Without a
  /// reference the lowest-BLEU published baseline is used.
  eval::Leaderboard leaderboard(std::string_view direction, std::optional<std::string> reference) const;

  State snapshot() const;
  std::vector<Event> read_log() const;

 private:
  void require(const Principal& who, Role role, std::string_view action) const;
  const PairState& known_pair(std::string_view pair_code, int missing_status) const;

  ServiceConfig cfg_;
  mutable std::shared_mutex mutex_;
  std::unique_ptr<EventStore> store_;
};

}  // namespace crisis::service
