#include "crisis/metrics/chrf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "crisis/common/error.hpp"
#include "crisis/common/text.hpp"

namespace crisis::metrics {

namespace {

std::u32string characters(const std::string& s, bool remove_whitespace) {
  std::u32string cps = text::to_code_points(s);
  if (remove_whitespace) std::erase_if(cps, text::is_whitespace);
  return cps;
}

std::unordered_map<std::u32string, std::size_t> char_ngrams(const std::u32string& s, std::size_t n) {
  std::unordered_map<std::u32string, std::size_t> counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) ++counts[s.substr(i, n)];
  return counts;
}

}  // namespace

MetricScore chrf(std::span<const std::string> hypotheses, std::span<const std::string> references,
                 const ChrfConfig& cfg) {
  if (cfg.max_char_order < 1) throw ValidationError("ChrF max_char_order must be at least 1");
  if (!(cfg.beta > 0.0)) throw ValidationError("ChrF beta must be positive");
  if (hypotheses.size() != references.size()) {
    throw ValidationError("ChrF needs one reference per hypothesis (" +
                          std::to_string(hypotheses.size()) + " vs " +
                          std::to_string(references.size()) + ")");
  }
  if (hypotheses.empty()) throw ValidationError("ChrF needs a nonempty corpus");

  const auto orders = static_cast<std::size_t>(cfg.max_char_order);
  std::vector<std::size_t> matches(orders, 0);
  std::vector<std::size_t> hyp_total(orders, 0);
  std::vector<std::size_t> ref_total(orders, 0);

  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const auto hyp = characters(hypotheses[s], cfg.remove_whitespace);
    const auto ref = characters(references[s], cfg.remove_whitespace);
    for (std::size_t n = 1; n <= orders; ++n) {
      const auto hyp_counts = char_ngrams(hyp, n);
      const auto ref_counts = char_ngrams(ref, n);
      for (const auto& [gram, count] : hyp_counts) {
        hyp_total[n - 1] += count;
        if (auto it = ref_counts.find(gram); it != ref_counts.end()) {
          matches[n - 1] += std::min(count, it->second);
        }
      }
      for (const auto& [gram, count] : ref_counts) ref_total[n - 1] += count;
    }
  }

  ChrfComponents c;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double p_sum = 0.0;
  double r_sum = 0.0;
  std::size_t p_orders = 0;
  std::size_t r_orders = 0;
  for (std::size_t n = 0; n < orders; ++n) {
    const double m = static_cast<double>(matches[n]);
    if (hyp_total[n] > 0) {
      c.precisions.push_back(m / static_cast<double>(hyp_total[n]));
      p_sum += c.precisions.back();
      ++p_orders;
    } else {
      c.precisions.push_back(nan);
    }
    if (ref_total[n] > 0) {
      c.recalls.push_back(m / static_cast<double>(ref_total[n]));
      r_sum += c.recalls.back();
      ++r_orders;
    } else {
      c.recalls.push_back(nan);
    }
  }
  c.char_precision = p_orders > 0 ? p_sum / static_cast<double>(p_orders) : 0.0;
  c.char_recall = r_orders > 0 ? r_sum / static_cast<double>(r_orders) : 0.0;

  const double b2 = cfg.beta * cfg.beta;
  const double denom = b2 * c.char_precision + c.char_recall;
  const double value =
      denom > 0.0 ? (1.0 + b2) * c.char_precision * c.char_recall / denom : 0.0;
  return MetricScore{MetricKind::chrf, value, std::move(c)};
}

}  // namespace crisis::metrics
