#pragma once

#include <span>
#include <string>

#include "crisis/metrics/score.hpp"

namespace crisis::metrics {

struct ChrfConfig {
  int max_char_order = 6;
  double beta = 3.0;
  bool remove_whitespace = true;
};

/// Corpus-level character n-gram F-score.
///
/// For each order, precision and recall use counts pooled over the corpus.
/// chrP / chrR average the orders whose denominator is nonzero, and the score
/// is (1 + b^2) chrP chrR / (b^2 chrP + chrR), or 0 when that denominator is 0.
/// N-grams are over code points; matching is case-sensitive.
MetricScore chrf(std::span<const std::string> hypotheses, std::span<const std::string> references,
                 const ChrfConfig& cfg = {});

}  // namespace crisis::metrics
