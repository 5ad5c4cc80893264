#pragma once

#include <span>
#include <string>

#include "crisis/metrics/score.hpp"
#include "crisis/metrics/tokenize.hpp"

namespace crisis::metrics {

struct BleuConfig {
  int max_order = 4;
  bool case_insensitive = true;
  TokenizerMode tokenizer = TokenizerMode::international;
};

/// Corpus-level single-reference BLEU without smoothing.
///
/// Clipped n-gram counts are computed per segment and pooled. The score is
/// BP * exp(mean log p_n) * 100 and drops to 0 when any pooled precision is 0.
/// BP = 1 when the hypothesis is longer than the reference, otherwise
/// exp(1 - ref_len / hyp_len).
///
/// Throws ValidationError on mismatched or empty inputs.
MetricScore bleu_corpus(std::span<const std::string> hypotheses,
                        std::span<const std::string> references, const BleuConfig& cfg = {});

}  // namespace crisis::metrics
