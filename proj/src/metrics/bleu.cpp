#include "crisis/metrics/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "crisis/common/error.hpp"
#include "crisis/common/text.hpp"

namespace crisis::metrics {

namespace {

using NgramCounts = std::unordered_map<std::string, std::size_t>;

// Tokens never contain spaces, so a space-joined string identifies the n-gram.
NgramCounts count_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string gram = tokens[i];
    for (std::size_t k = 1; k < n; ++k) {
      gram.push_back(' ');
      gram += tokens[i + k];
    }
    ++counts[gram];
  }
  return counts;
}

std::vector<std::string> prepare(const std::string& text, const BleuConfig& cfg) {
  return tokenize(cfg.case_insensitive ? text::case_fold(text) : text, cfg.tokenizer);
}

}  // namespace

MetricScore bleu_corpus(std::span<const std::string> hypotheses,
                        std::span<const std::string> references, const BleuConfig& cfg) {
  if (cfg.max_order < 1) throw ValidationError("BLEU max_order must be at least 1");
  if (hypotheses.size() != references.size()) {
    throw ValidationError("BLEU needs one reference per hypothesis (" +
                          std::to_string(hypotheses.size()) + " vs " +
                          std::to_string(references.size()) + ")");
  }
  if (hypotheses.empty()) throw ValidationError("BLEU needs a nonempty corpus");

  const auto orders = static_cast<std::size_t>(cfg.max_order);
  BleuComponents c;
  c.matches.assign(orders, 0);
  c.totals.assign(orders, 0);

  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const auto hyp = prepare(hypotheses[s], cfg);
    const auto ref = prepare(references[s], cfg);
    c.hypothesis_length += hyp.size();
    c.reference_length += ref.size();
    for (std::size_t n = 1; n <= orders; ++n) {
      const NgramCounts hyp_counts = count_ngrams(hyp, n);
      const NgramCounts ref_counts = count_ngrams(ref, n);
      for (const auto& [gram, count] : hyp_counts) {
        c.totals[n - 1] += count;
        if (auto it = ref_counts.find(gram); it != ref_counts.end()) {
          c.matches[n - 1] += std::min(count, it->second);
        }
      }
    }
  }

  c.precisions.resize(orders);
  for (std::size_t n = 0; n < orders; ++n) {
    c.precisions[n] = c.totals[n] == 0 ? 0.0
                                       : static_cast<double>(c.matches[n]) /
                                             static_cast<double>(c.totals[n]);
    if (c.totals[n] > 0) c.effective_order = static_cast<int>(n + 1);
  }

  if (c.hypothesis_length == 0) {
    c.brevity_penalty = 0.0;
  } else if (c.hypothesis_length > c.reference_length) {
    c.brevity_penalty = 1.0;
  } else {
    c.brevity_penalty = std::exp(1.0 - static_cast<double>(c.reference_length) /
                                           static_cast<double>(c.hypothesis_length));
  }

  double value = 0.0;
  if (c.effective_order > 0) {
    double log_sum = 0.0;
    bool zero = false;
    for (int n = 0; n < c.effective_order; ++n) {
      if (c.matches[static_cast<std::size_t>(n)] == 0) {
        zero = true;
        break;
      }
      log_sum += std::log(c.precisions[static_cast<std::size_t>(n)]);
    }
    if (!zero) value = c.brevity_penalty * std::exp(log_sum / c.effective_order) * 100.0;
  }

  return MetricScore{MetricKind::bleu, value, std::move(c)};
}

}  // namespace crisis::metrics
