#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crisis/common/time.hpp"

namespace crisis::corpus {

/// Directed language pair, e.g. en->ga. Tags are lowercase ISO-639-1.
/// A default-constructed pair is "unset" and only appears on empty corpora.
class LanguagePair {
 public:
  LanguagePair() = default;

  /// Throws ValidationError unless both tags match [a-z]{2} and differ.
  LanguagePair(std::string source, std::string target);

  /// Parses "en-ga".
  static LanguagePair parse(std::string_view code);

  const std::string& source() const noexcept { return source_; }
  const std::string& target() const noexcept { return target_; }
  bool is_set() const noexcept { return !source_.empty(); }
  std::string code() const { return source_ + "-" + target_; }
  LanguagePair reversed() const { return LanguagePair(target_, source_); }

  friend bool operator==(const LanguagePair&, const LanguagePair&) = default;
  friend auto operator<=>(const LanguagePair&, const LanguagePair&) = default;

 private:
  std::string source_;
  std::string target_;
};

enum class Stream { community, expert, llm_ensemble };
enum class ReviewStatus { pending, accepted, rejected };
enum class PhaseLabel { custom_gpt, finetuned_llm, finetuned_mllm };

inline constexpr std::array kAllStreams{Stream::community, Stream::expert, Stream::llm_ensemble};
inline constexpr std::array kAllStatuses{ReviewStatus::pending, ReviewStatus::accepted,
                                         ReviewStatus::rejected};

std::string_view to_string(Stream s);
std::string_view to_string(ReviewStatus s);
std::string_view to_string(PhaseLabel p);
Stream parse_stream(std::string_view s);
ReviewStatus parse_status(std::string_view s);

/// Stage of the crisis response. Ordinal and label are in bijection:
/// 1 custom_gpt, 2 finetuned_llm, 3 finetuned_mllm.
class CrisisPhase {
 public:
  static constexpr int kFirst = 1;
  static constexpr int kLast = 3;

  constexpr CrisisPhase() = default;
  static CrisisPhase from_ordinal(int ordinal);
  static CrisisPhase from_label(PhaseLabel label);
  static CrisisPhase from_label(std::string_view label);

  int ordinal() const noexcept { return ordinal_; }
  PhaseLabel label() const noexcept { return static_cast<PhaseLabel>(ordinal_ - 1); }
  bool is_last() const noexcept { return ordinal_ == kLast; }
  /// Throws ValidationError at phase 3.
  CrisisPhase next() const;

  friend bool operator==(CrisisPhase, CrisisPhase) = default;

 private:
  explicit constexpr CrisisPhase(int ordinal) : ordinal_(ordinal) {}
  int ordinal_ = kFirst;
};

struct Segment {
  std::string id;
  LanguagePair pair;
  std::string source_text;
  std::string target_text;
  std::string contributor;
  Stream stream = Stream::community;
  CrisisPhase phase;
  ReviewStatus status = ReviewStatus::pending;
  Timestamp created_at{};
  /// 1-based line in the file the segment was ingested from, if any.
  std::optional<std::size_t> source_line;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct CorpusStats {
  std::size_t total = 0;
  std::array<std::size_t, 3> by_status{};
  std::array<std::size_t, 3> by_stream{};
  std::array<std::size_t, 3> by_phase{};

  std::size_t count(ReviewStatus s) const { return by_status[static_cast<std::size_t>(s)]; }
  std::size_t count(Stream s) const { return by_stream[static_cast<std::size_t>(s)]; }
  std::size_t count(CrisisPhase p) const {
    return by_phase[static_cast<std::size_t>(p.ordinal() - 1)];
  }

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

CorpusStats compute_stats(const std::vector<Segment>& segments);

struct Corpus {
  LanguagePair pair;
  std::vector<Segment> segments;

  CorpusStats stats() const { return compute_stats(segments); }
  std::size_t size() const noexcept { return segments.size(); }
  bool empty() const noexcept { return segments.empty(); }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

enum class SplitName { train, validation, test };
inline constexpr std::array kAllSplits{SplitName::train, SplitName::validation, SplitName::test};
std::string_view to_string(SplitName s);
SplitName parse_split_name(std::string_view s);

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;

  /// Throws ValidationError unless each ratio is in (0,1) and they sum to 1 +- 1e-9.
  void validate() const;
  /// Parses "0.8,0.1,0.1".
  static SplitRatios parse(std::string_view text);

  friend bool operator==(const SplitRatios&, const SplitRatios&) = default;
};

struct SplitManifest {
  std::string corpus_fingerprint;
  std::uint64_t seed = 0;
  SplitRatios ratios;
  std::map<std::string, SplitName> assignments;

  std::size_t count(SplitName s) const;
  std::vector<std::string> ids(SplitName s) const;
};

/// Fine-tuning hyperparameters recorded alongside exported corpora. Stored
/// metadata only; nothing in this project trains a model.
struct FinetuneSpec {
  int epochs = 5;
  int batch_size = 16;
  int gradient_steps = 8;
  double learning_rate = 3e-5;
  double weight_decay = 0.1;
  bool mixed_precision = true;
  std::string notes =
      "Hosted chat-model fine-tuning used default parameters with epochs set to auto.";

  /// Throws ValidationError when a numeric field is not positive.
  void validate() const;
};

}  // namespace crisis::corpus
