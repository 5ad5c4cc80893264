#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crisis/backends/config.hpp"
#include "crisis/corpus/types.hpp"

namespace crisis::backends {

/// Exactly one of `hypothesis` and `error` is set.
struct TranslationResult {
  std::string segment_id;
  std::optional<std::string> hypothesis;
  std::optional<std::string> error;
  std::chrono::milliseconds latency{0};
  std::string backend;

  bool ok() const noexcept { return hypothesis.has_value(); }
};

struct BatchOptions {
  /// Window over which `rate_limit` is enforced.
  std::chrono::milliseconds rate_window{60'000};
  /// First retry delay; doubles on each further attempt.
  std::chrono::milliseconds retry_base_delay{500};
};

/// Token-wise lookup over whitespace-separated tokens; unknown tokens pass through.
std::string dictionary_translate(const std::map<std::string, std::string>& table,
                                 std::string_view text);

/// One result per segment, in input order. Per-segment failures become error
/// results. Throws ValidationError on an empty or mixed-pair batch and
/// BackendError on an unusable remote configuration.
std::vector<TranslationResult> translate_batch(const BackendConfig& cfg,
                                               std::span<const corpus::Segment> segments,
                                               const BatchOptions& options = {});

}  // namespace crisis::backends
