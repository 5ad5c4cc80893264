#include "crisis/corpus/types.hpp"

#include <charconv>
#include <cmath>

#include "crisis/common/error.hpp"

namespace crisis::corpus {

namespace {

bool is_language_tag(std::string_view tag) {
  return tag.size() == 2 && tag[0] >= 'a' && tag[0] <= 'z' && tag[1] >= 'a' && tag[1] <= 'z';
}

}  // namespace

LanguagePair::LanguagePair(std::string source, std::string target)
    : source_(std::move(source)), target_(std::move(target)) {
  if (!is_language_tag(source_) || !is_language_tag(target_)) {
    throw ValidationError("language tags must be two lowercase letters, got '" + source_ +
                          "' and '" + target_ + "'");
  }
  if (source_ == target_) {
    throw ValidationError("source and target language must differ: " + source_);
  }
}

LanguagePair LanguagePair::parse(std::string_view code) {
  const auto dash = code.find('-');
  if (dash == std::string_view::npos) {
    throw ValidationError("language pair must look like 'en-ga', got '" + std::string(code) + "'");
  }
  return LanguagePair(std::string(code.substr(0, dash)), std::string(code.substr(dash + 1)));
}

std::string_view to_string(Stream s) {
  switch (s) {
    case Stream::community: return "community";
    case Stream::expert: return "expert";
    case Stream::llm_ensemble: return "llm_ensemble";
  }
  return "community";
}

std::string_view to_string(ReviewStatus s) {
  switch (s) {
    case ReviewStatus::pending: return "pending";
    case ReviewStatus::accepted: return "accepted";
    case ReviewStatus::rejected: return "rejected";
  }
  return "pending";
}

std::string_view to_string(PhaseLabel p) {
  switch (p) {
    case PhaseLabel::custom_gpt: return "custom_gpt";
    case PhaseLabel::finetuned_llm: return "finetuned_llm";
    case PhaseLabel::finetuned_mllm: return "finetuned_mllm";
  }
  return "custom_gpt";
}

Stream parse_stream(std::string_view s) {
  for (Stream v : kAllStreams) {
    if (to_string(v) == s) return v;
  }
  throw ValidationError("unknown stream '" + std::string(s) + "'");
}

ReviewStatus parse_status(std::string_view s) {
  for (ReviewStatus v : kAllStatuses) {
    if (to_string(v) == s) return v;
  }
  throw ValidationError("unknown review status '" + std::string(s) + "'");
}

CrisisPhase CrisisPhase::from_ordinal(int ordinal) {
  if (ordinal < kFirst || ordinal > kLast) {
    throw ValidationError("crisis phase ordinal must be 1-3, got " + std::to_string(ordinal));
  }
  return CrisisPhase(ordinal);
}

CrisisPhase CrisisPhase::from_label(PhaseLabel label) {
  return CrisisPhase(static_cast<int>(label) + 1);
}

CrisisPhase CrisisPhase::from_label(std::string_view label) {
  for (int i = kFirst; i <= kLast; ++i) {
    const CrisisPhase p(i);
    if (to_string(p.label()) == label) return p;
  }
  throw ValidationError("unknown crisis phase '" + std::string(label) + "'");
}

CrisisPhase CrisisPhase::next() const {
  if (is_last()) throw ValidationError("already at the final crisis phase");
  return CrisisPhase(ordinal_ + 1);
}

CorpusStats compute_stats(const std::vector<Segment>& segments) {
  CorpusStats stats;
  stats.total = segments.size();
  for (const Segment& s : segments) {
    ++stats.by_status[static_cast<std::size_t>(s.status)];
    ++stats.by_stream[static_cast<std::size_t>(s.stream)];
    ++stats.by_phase[static_cast<std::size_t>(s.phase.ordinal() - 1)];
  }
  return stats;
}

std::string_view to_string(SplitName s) {
  switch (s) {
    case SplitName::train: return "train";
    case SplitName::validation: return "validation";
    case SplitName::test: return "test";
  }
  return "train";
}

SplitName parse_split_name(std::string_view s) {
  for (SplitName v : kAllSplits) {
    if (to_string(v) == s) return v;
  }
  throw ValidationError("unknown split '" + std::string(s) + "'");
}

void SplitRatios::validate() const {
  for (double r : {train, validation, test}) {
    if (!(r > 0.0 && r < 1.0)) {
      throw ValidationError("each split ratio must lie strictly between 0 and 1");
    }
  }
  if (std::abs(train + validation + test - 1.0) > 1e-9) {
    throw ValidationError("split ratios must sum to 1");
  }
}

SplitRatios SplitRatios::parse(std::string_view text) {
  double values[3];
  std::size_t n = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    if (n == 3) throw ValidationError("expected three comma-separated ratios");
    auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), values[n]);
    if (ec != std::errc{} || ptr != piece.data() + piece.size() || piece.empty()) {
      throw ValidationError("malformed ratio '" + std::string(piece) + "'");
    }
    ++n;
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (n != 3) throw ValidationError("expected three comma-separated ratios");
  SplitRatios r{values[0], values[1], values[2]};
  r.validate();
  return r;
}

std::size_t SplitManifest::count(SplitName s) const {
  std::size_t n = 0;
  for (const auto& [id, split] : assignments) n += split == s ? 1 : 0;
  return n;
}

std::vector<std::string> SplitManifest::ids(SplitName s) const {
  std::vector<std::string> out;
  for (const auto& [id, split] : assignments) {
    if (split == s) out.push_back(id);
  }
  return out;
}

void FinetuneSpec::validate() const {
  if (epochs <= 0 || batch_size <= 0 || gradient_steps <= 0 || !(learning_rate > 0.0) ||
      !(weight_decay > 0.0)) {
    throw ValidationError("fine-tuning hyperparameters must be positive");
  }
}

}  // namespace crisis::corpus
