#pragma once

#include <cstddef>
#include <string_view>
#include <variant>
#include <vector>

namespace crisis::metrics {

enum class MetricKind { bleu, ter, chrf };
std::string_view to_string(MetricKind kind);

struct BleuComponents {
  /// Pooled clipped matches and hypothesis n-gram totals, index 0 = unigrams.
  std::vector<std::size_t> matches;
  std::vector<std::size_t> totals;
  std::vector<double> precisions;
  double brevity_penalty = 0.0;
  std::size_t hypothesis_length = 0;
  std::size_t reference_length = 0;
  /// Orders that entered the geometric mean (orders with no hypothesis
  /// n-grams anywhere in the corpus are left out).
  int effective_order = 0;
};

struct TerComponents {
  /// Total edits: insertions + deletions + substitutions + shifts.
  std::size_t edits = 0;
  std::size_t shifts = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t substitutions = 0;
  std::size_t reference_length = 0;
};

struct ChrfComponents {
  /// Per character order; NaN where the order had no n-grams on that side.
  std::vector<double> precisions;
  std::vector<double> recalls;
  double char_precision = 0.0;
  double char_recall = 0.0;
};

/// BLEU is on a 0-100 scale; TER and ChrF on 0-1 (TER may exceed 1).
struct MetricScore {
  MetricKind metric = MetricKind::bleu;
  double value = 0.0;
  std::variant<BleuComponents, TerComponents, ChrfComponents> components;

  const BleuComponents& bleu() const { return std::get<BleuComponents>(components); }
  const TerComponents& ter() const { return std::get<TerComponents>(components); }
  const ChrfComponents& chrf() const { return std::get<ChrfComponents>(components); }
};

}  // namespace crisis::metrics
