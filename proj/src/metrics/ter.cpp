#include "crisis/metrics/ter.hpp"

#include <algorithm>
#include <optional>
#include <tuple>
#include <unordered_map>

#include "crisis/common/error.hpp"
#include "crisis/common/text.hpp"

namespace crisis::metrics {

namespace {

using Words = std::vector<int>;

enum class Op : char { match, substitute, drop_hyp, add_ref };

std::size_t distance(const Words& a, const Words& b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

struct Alignment {
  std::size_t cost = 0;
  std::vector<Op> ops;
};

Alignment align(const Words& hyp, const Words& ref) {
  const std::size_t n = hyp.size();
  const std::size_t m = ref.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  const auto at = [m](std::size_t i, std::size_t j) { return i * (m + 1) + j; };
  for (std::size_t i = 0; i <= n; ++i) d[at(i, 0)] = i;
  for (std::size_t j = 0; j <= m; ++j) d[at(0, j)] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      d[at(i, j)] = std::min({d[at(i - 1, j)] + 1, d[at(i, j - 1)] + 1,
                              d[at(i - 1, j - 1)] + (hyp[i - 1] == ref[j - 1] ? 0 : 1)});
    }
  }

  Alignment out;
  out.cost = d[at(n, m)];
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = hyp[i - 1] == ref[j - 1];
      if (d[at(i, j)] == d[at(i - 1, j - 1)] + (same ? 0 : 1)) {
        out.ops.push_back(same ? Op::match : Op::substitute);
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && d[at(i, j)] == d[at(i - 1, j)] + 1) {
      out.ops.push_back(Op::drop_hyp);
      --i;
    } else {
      out.ops.push_back(Op::add_ref);
      --j;
    }
  }
  std::reverse(out.ops.begin(), out.ops.end());
  return out;
}

struct AlignmentView {
  std::vector<bool> hyp_error;
  std::vector<bool> ref_error;
  // Hypothesis position aligned with each reference word; for a reference
  // word with no counterpart, the hypothesis word before it (-1 at the start).
  std::vector<long> ref_to_hyp;
};

AlignmentView view_of(const Alignment& a, std::size_t n, std::size_t m) {
  AlignmentView v{std::vector<bool>(n, false), std::vector<bool>(m, false),
                  std::vector<long>(m, -1)};
  long i = 0;
  std::size_t j = 0;
  for (Op op : a.ops) {
    switch (op) {
      case Op::match:
        v.ref_to_hyp[j++] = i++;
        break;
      case Op::substitute:
        v.hyp_error[static_cast<std::size_t>(i)] = true;
        v.ref_error[j] = true;
        v.ref_to_hyp[j++] = i++;
        break;
      case Op::drop_hyp:
        v.hyp_error[static_cast<std::size_t>(i++)] = true;
        break;
      case Op::add_ref:
        v.ref_error[j] = true;
        v.ref_to_hyp[j++] = i - 1;
        break;
    }
  }
  return v;
}

// Moves hyp[start, start+len) so that it sits before original position
// `dest`, where dest lies outside [start, start+len].
Words shifted(const Words& hyp, std::size_t start, std::size_t len, std::size_t dest) {
  Words out;
  out.reserve(hyp.size());
  const auto block_begin = hyp.begin() + static_cast<long>(start);
  const auto block_end = block_begin + static_cast<long>(len);
  if (dest < start) {
    out.insert(out.end(), hyp.begin(), hyp.begin() + static_cast<long>(dest));
    out.insert(out.end(), block_begin, block_end);
    out.insert(out.end(), hyp.begin() + static_cast<long>(dest), block_begin);
    out.insert(out.end(), block_end, hyp.end());
  } else {
    out.insert(out.end(), hyp.begin(), block_begin);
    out.insert(out.end(), block_end, hyp.begin() + static_cast<long>(dest));
    out.insert(out.end(), block_begin, block_end);
    out.insert(out.end(), hyp.begin() + static_cast<long>(dest), hyp.end());
  }
  return out;
}

struct Candidate {
  long gain;
  std::size_t length;
  std::size_t start;
  std::size_t dest;
  Words words;

  // Larger gain, then longer block, then earlier block, then earlier destination.
  bool better_than(const Candidate& o) const {
    return std::make_tuple(gain, length, -static_cast<long>(start), -static_cast<long>(dest)) >
           std::make_tuple(o.gain, o.length, -static_cast<long>(o.start), -static_cast<long>(o.dest));
  }
};

std::optional<Candidate> best_shift(const Words& hyp, const Words& ref) {
  const Alignment current = align(hyp, ref);
  const AlignmentView view = view_of(current, hyp.size(), ref.size());
  const std::size_t n = hyp.size();
  const std::size_t m = ref.size();

  std::optional<Candidate> best;
  for (std::size_t start_h = 0; start_h < n; ++start_h) {
    const std::size_t r_lo = start_h > kMaxShiftDistance ? start_h - kMaxShiftDistance : 0;
    const std::size_t r_hi = std::min(m, start_h + kMaxShiftDistance + 1);
    for (std::size_t start_r = r_lo; start_r < r_hi; ++start_r) {
      bool hyp_wrong = false;
      bool ref_wrong = false;
      for (std::size_t len = 1; len <= kMaxShiftSize && start_h + len <= n && start_r + len <= m;
           ++len) {
        if (hyp[start_h + len - 1] != ref[start_r + len - 1]) break;
        hyp_wrong = hyp_wrong || view.hyp_error[start_h + len - 1];
        ref_wrong = ref_wrong || view.ref_error[start_r + len - 1];
        if (!hyp_wrong || !ref_wrong) continue;
        const long anchor = view.ref_to_hyp[start_r];
        if (anchor >= static_cast<long>(start_h) && anchor < static_cast<long>(start_h + len)) {
          continue;
        }

        long previous = -1;
        for (long offset = -1; offset < static_cast<long>(len); ++offset) {
          const long r = static_cast<long>(start_r) + offset;
          const long dest = r < 0 ? 0 : view.ref_to_hyp[static_cast<std::size_t>(r)] + 1;
          if (dest == previous) continue;
          previous = dest;
          const auto d = static_cast<std::size_t>(dest);
          if (d >= start_h && d <= start_h + len) continue;
          Words words = shifted(hyp, start_h, len, d);
          const long gain =
              static_cast<long>(current.cost) - static_cast<long>(distance(words, ref));
          Candidate cand{gain, len, start_h, d, std::move(words)};
          if (!best || cand.better_than(*best)) best = std::move(cand);
        }
      }
    }
  }
  return best;
}

}  // namespace

std::size_t word_edit_distance(std::span<const std::string> a, std::span<const std::string> b) {
  std::unordered_map<std::string, int> ids;
  const auto encode = [&ids](std::span<const std::string> words) {
    Words out;
    for (const auto& w : words) out.push_back(ids.try_emplace(w, static_cast<int>(ids.size())).first->second);
    return out;
  };
  return distance(encode(a), encode(b));
}

TerSegmentResult ter_segment(std::span<const std::string> hypothesis,
                             std::span<const std::string> reference) {
  std::unordered_map<std::string, int> ids;
  std::vector<std::string> vocab;
  const auto encode = [&](std::span<const std::string> words) {
    Words out;
    for (const auto& w : words) {
      auto [it, inserted] = ids.try_emplace(w, static_cast<int>(vocab.size()));
      if (inserted) vocab.push_back(w);
      out.push_back(it->second);
    }
    return out;
  };
  Words hyp = encode(hypothesis);
  const Words ref = encode(reference);

  TerSegmentResult result;
  while (auto shift = best_shift(hyp, ref)) {
    if (shift->gain <= 0) break;
    hyp = std::move(shift->words);
    ++result.counts.shifts;
  }

  const Alignment final_alignment = align(hyp, ref);
  for (Op op : final_alignment.ops) {
    switch (op) {
      case Op::match: break;
      case Op::substitute: ++result.counts.substitutions; break;
      case Op::drop_hyp: ++result.counts.deletions; break;
      case Op::add_ref: ++result.counts.insertions; break;
    }
  }
  result.counts.edits = result.counts.shifts + final_alignment.cost;
  result.counts.reference_length = ref.size();
  for (int id : hyp) result.shifted_hypothesis.push_back(vocab[static_cast<std::size_t>(id)]);
  return result;
}

MetricScore ter(std::span<const std::string> hypotheses, std::span<const std::string> references,
                const TerConfig& cfg) {
  if (hypotheses.size() != references.size()) {
    throw ValidationError("TER needs one reference per hypothesis (" +
                          std::to_string(hypotheses.size()) + " vs " +
                          std::to_string(references.size()) + ")");
  }
  if (hypotheses.empty()) throw ValidationError("TER needs a nonempty corpus");

  TerComponents total;
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    const auto prep = [&cfg](const std::string& t) {
      return tokenize(cfg.case_insensitive ? text::case_fold(t) : t, cfg.tokenizer);
    };
    const auto hyp = prep(hypotheses[s]);
    const auto ref = prep(references[s]);
    if (ref.empty()) {
      throw ValidationError("TER is undefined for an empty reference (segment " +
                            std::to_string(s + 1) + ")");
    }
    const TerComponents c = ter_segment(hyp, ref).counts;
    total.edits += c.edits;
    total.shifts += c.shifts;
    total.insertions += c.insertions;
    total.deletions += c.deletions;
    total.substitutions += c.substitutions;
    total.reference_length += c.reference_length;
  }
  const double value =
      static_cast<double>(total.edits) / static_cast<double>(total.reference_length);
  return MetricScore{MetricKind::ter, value, total};
}

}  // namespace crisis::metrics
