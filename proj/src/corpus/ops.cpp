#include "crisis/corpus/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "crisis/common/error.hpp"
#include "crisis/common/hash.hpp"
#include "crisis/common/text.hpp"

namespace crisis::corpus {

std::string match_key(std::string_view text) {
  return text::case_fold(text::normalize_text(text));
}

std::string dedup_key(const Segment& seg) {
  std::string key = match_key(seg.source_text);
  key.push_back(kKeySeparator);
  key += match_key(seg.target_text);
  return key;
}

Corpus concat_histories(std::span<const Corpus> streams) {
  Corpus out;
  if (streams.empty()) return out;
  out.pair = streams.front().pair;
  for (std::size_t i = 0; i < streams.size(); ++i) {
    const Corpus& stream = streams[i];
    if (stream.pair != out.pair) {
      throw ValidationError("stream " + std::to_string(i) + " has language pair " +
                            stream.pair.code() + ", expected " + out.pair.code());
    }
    std::vector<Segment> ordered = stream.segments;
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const Segment& a, const Segment& b) { return a.created_at < b.created_at; });
    for (Segment& s : ordered) {
      if (s.pair != out.pair) {
        throw ValidationError("stream " + std::to_string(i) + " contains segment " + s.id +
                              " with language pair " + s.pair.code());
      }
      out.segments.push_back(std::move(s));
    }
  }
  return out;
}

std::pair<Corpus, DedupReport> deduplicate(const Corpus& corpus) {
  Corpus kept{corpus.pair, {}};
  DedupReport report;
  std::unordered_map<std::string, std::string> first_by_key;
  for (const Segment& seg : corpus.segments) {
    auto [it, inserted] = first_by_key.try_emplace(dedup_key(seg), seg.id);
    if (inserted) {
      kept.segments.push_back(seg);
    } else {
      report.removals.push_back({seg.id, it->second});
    }
  }
  return {std::move(kept), std::move(report)};
}

std::string corpus_fingerprint(std::span<const Segment> segments) {
  std::vector<std::string> lines;
  lines.reserve(segments.size());
  for (const Segment& s : segments) {
    lines.push_back(s.id + '\t' + dedup_key(s));
  }
  std::sort(lines.begin(), lines.end());
  std::string joined;
  for (const std::string& line : lines) {
    joined += line;
    joined.push_back('\n');
  }
  return hash::sha256_hex(joined);
}

SplitManifest split(const Corpus& corpus, const SplitRatios& ratios, std::uint64_t seed) {
  ratios.validate();

  struct Entry {
    std::uint64_t rank;
    std::string key;
    const Segment* seg;
  };
  std::vector<Entry> entries;
  std::vector<Segment> eligible;
  std::unordered_set<std::string> ids;
  std::unordered_set<std::string> keys;
  for (const Segment& seg : corpus.segments) {
    if (seg.status == ReviewStatus::rejected) continue;
    if (!ids.insert(seg.id).second) throw ValidationError("duplicate segment id " + seg.id);
    std::string key = dedup_key(seg);
    if (!keys.insert(key).second) {
      throw ValidationError("corpus is not deduplicated: segment " + seg.id +
                            " repeats an earlier dedup key");
    }
    entries.push_back({hash::keyed_hash64(seed, key), std::move(key), &seg});
    eligible.push_back(seg);
  }
  const std::size_t n = entries.size();
  if (n < 3) {
    throw ValidationError("split needs at least 3 eligible segments, got " + std::to_string(n));
  }

  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.rank != b.rank) return a.rank < b.rank;
    return a.seg->id < b.seg->id;
  });

  // The epsilon keeps products like 0.1 * 1000 from flooring one short.
  const auto floor_size = [n](double ratio) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio + 1e-9));
  };
  const std::size_t n_validation = floor_size(ratios.validation);
  const std::size_t n_test = floor_size(ratios.test);
  const std::size_t n_train = n - n_validation - n_test;

  SplitManifest manifest;
  manifest.corpus_fingerprint = corpus_fingerprint(eligible);
  manifest.seed = seed;
  manifest.ratios = ratios;
  for (std::size_t i = 0; i < n; ++i) {
    const SplitName which = i < n_train                  ? SplitName::train
                            : i < n_train + n_validation ? SplitName::validation
                                                         : SplitName::test;
    manifest.assignments.emplace(entries[i].seg->id, which);
  }
  return manifest;
}

Corpus select_split(const Corpus& corpus, const SplitManifest& manifest, SplitName which) {
  Corpus out{corpus.pair, {}};
  for (const Segment& seg : corpus.segments) {
    auto it = manifest.assignments.find(seg.id);
    if (it != manifest.assignments.end() && it->second == which) out.segments.push_back(seg);
  }
  return out;
}

OverlapReport contamination_check(std::span<const Segment> train, std::span<const Segment> test) {
  std::unordered_map<std::string, std::vector<std::size_t>> by_source;
  std::unordered_map<std::string, std::vector<std::size_t>> by_pair;
  for (std::size_t i = 0; i < train.size(); ++i) {
    by_source[match_key(train[i].source_text)].push_back(i);
    by_pair[dedup_key(train[i])].push_back(i);
  }

  OverlapReport report;
  for (const Segment& t : test) {
    if (auto it = by_source.find(match_key(t.source_text)); it != by_source.end()) {
      for (std::size_t i : it->second) report.source_hits.push_back({train[i].id, t.id});
    }
    if (auto it = by_pair.find(dedup_key(t)); it != by_pair.end()) {
      for (std::size_t i : it->second) report.pair_hits.push_back({train[i].id, t.id});
    }
  }
  return report;
}

}  // namespace crisis::corpus
