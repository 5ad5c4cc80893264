#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "crisis/metrics/score.hpp"
#include "crisis/metrics/tokenize.hpp"

namespace crisis::metrics {

struct TerConfig {
  bool case_insensitive = true;
  TokenizerMode tokenizer = TokenizerMode::international;
};

/// Shift search limits: longest movable block and farthest distance between
/// the block's hypothesis and reference positions.
inline constexpr std::size_t kMaxShiftSize = 10;
inline constexpr std::size_t kMaxShiftDistance = 50;

struct TerSegmentResult {
  TerComponents counts;
  /// Hypothesis tokens after all shifts were applied.
  std::vector<std::string> shifted_hypothesis;
};

/// Word-level Levenshtein distance (unit costs).
std::size_t word_edit_distance(std::span<const std::string> a, std::span<const std::string> b);

/// TER edits for one tokenized segment pair.
///
/// Greedy: while some shift strictly lowers the edit distance, apply the one
/// with the largest reduction (ties: longer block, earlier block, earlier
/// destination). A block is movable only if it matches a reference span
/// word-for-word, at least one of its words is currently misaligned, and the
/// matching reference span is not already fully matched. Each shift costs 1.
TerSegmentResult ter_segment(std::span<const std::string> hypothesis,
                             std::span<const std::string> reference);

/// Corpus TER = total edits / total reference words.
/// Throws ValidationError on mismatched or empty inputs and on an empty
/// reference segment.
MetricScore ter(std::span<const std::string> hypotheses, std::span<const std::string> references,
                const TerConfig& cfg = {});

}  // namespace crisis::metrics
