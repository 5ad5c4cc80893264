#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "crisis/corpus/types.hpp"

namespace crisis::corpus {

/// Separates source and target inside a dedup key (ASCII unit separator).
inline constexpr char kKeySeparator = '\x1f';

/// case_fold(normalize_text(text)): the identity used for matching one side.
std::string match_key(std::string_view text);

/// match_key(source) + unit separator + match_key(target).
std::string dedup_key(const Segment& seg);

/// Joins several conversation-history streams into one corpus. Streams keep
/// their list order; within a stream segments are stably ordered by
/// created_at. No deduplication happens here.
/// Throws ValidationError naming the first stream whose pair differs.
Corpus concat_histories(std::span<const Corpus> streams);

struct DedupRemoval {
  std::string removed_id;
  std::string surviving_id;

  friend bool operator==(const DedupRemoval&, const DedupRemoval&) = default;
};

struct DedupReport {
  std::vector<DedupRemoval> removals;
};

/// Keeps the first occurrence of each dedup key, preserving order.
std::pair<Corpus, DedupReport> deduplicate(const Corpus& corpus);

/// Order-independent content hash over (id, dedup key) of every segment.
std::string corpus_fingerprint(std::span<const Segment> segments);

/// Deterministic three-way partition of every non-rejected segment.
///
/// Segments are ordered by keyed_hash64(seed, dedup_key) (ties by id), then
/// cut: the validation and test sizes are floor(n * ratio) and train takes
/// the rest, so remainder segments always land in train.
///
/// Throws ValidationError on bad ratios, fewer than three eligible segments,
/// duplicate ids, or duplicate dedup keys (the corpus must be deduplicated).
SplitManifest split(const Corpus& corpus, const SplitRatios& ratios, std::uint64_t seed);

/// Segments of `corpus` assigned to `which`, in corpus order.
Corpus select_split(const Corpus& corpus, const SplitManifest& manifest, SplitName which);

struct OverlapHit {
  std::string train_id;
  std::string test_id;

  friend bool operator==(const OverlapHit&, const OverlapHit&) = default;
};

struct OverlapReport {
  /// Pairs whose matched source text is identical.
  std::vector<OverlapHit> source_hits;
  /// Pairs whose full dedup key (source and target) is identical.
  std::vector<OverlapHit> pair_hits;

  bool empty() const noexcept { return source_hits.empty() && pair_hits.empty(); }
};

/// Hits are ordered by test position, then train position.
OverlapReport contamination_check(std::span<const Segment> train, std::span<const Segment> test);

}  // namespace crisis::corpus
