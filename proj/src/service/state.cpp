#include "crisis/service/state.hpp"

#include <algorithm>
#include <set>

#include "crisis/common/error.hpp"
#include "crisis/corpus/io.hpp"
#include "crisis/corpus/ops.hpp"

namespace crisis::service {

using Json = nlohmann::ordered_json;
using corpus::ReviewStatus;

namespace {

std::string live_key(const corpus::Segment& seg) { return seg.pair.code() + '\x1e' + corpus::dedup_key(seg); }

}  // namespace

Json PairStats::to_json() const {
  Json j;
  j["pair"] = pair.code();
  j["phase"] = {{"ordinal", phase.ordinal()}, {"label", corpus::to_string(phase.label())}};
  j["total"] = counts.total;
  Json by_status;
  for (auto s : corpus::kAllStatuses) by_status[std::string(corpus::to_string(s))] = counts.count(s);
  j["by_status"] = by_status;
  Json by_stream;
  for (auto s : corpus::kAllStreams) by_stream[std::string(corpus::to_string(s))] = counts.count(s);
  j["by_stream"] = by_stream;
  Json by_phase;
  for (int p = corpus::CrisisPhase::kFirst; p <= corpus::CrisisPhase::kLast; ++p) {
    by_phase[std::to_string(p)] = counts.count(corpus::CrisisPhase::from_ordinal(p));
  }
  j["by_phase"] = by_phase;
  j["contributors"] = contributors;
  j["last_submission_at"] = last_submission_at ? Json(format_rfc3339(*last_submission_at)) : Json(nullptr);
  return j;
}

State::State(std::span<const corpus::LanguagePair> pairs) {
  for (const auto& p : pairs) pairs_.emplace(p.code(), PairState{p, {}, {}});
}

const PairState* State::find_pair(std::string_view code) const {
  auto it = pairs_.find(std::string(code));
  return it == pairs_.end() ? nullptr : &it->second;
}

const SegmentEntry* State::find_segment(std::string_view id) const {
  auto it = segments_.find(std::string(id));
  return it == segments_.end() ? nullptr : &it->second;
}

const ExportEntry* State::find_export(std::string_view receipt_id) const {
  auto it = exports_.find(std::string(receipt_id));
  return it == exports_.end() ? nullptr : &it->second;
}

std::optional<std::string> State::live_duplicate(const corpus::Segment& candidate) const {
  auto it = live_keys_.find(live_key(candidate));
  if (it == live_keys_.end() || it->second.empty()) return std::nullopt;
  return it->second.front();
}

PairState& State::pair_state(const corpus::LanguagePair& pair) {
  auto [it, inserted] = pairs_.try_emplace(pair.code(), PairState{pair, {}, {}});
  return it->second;
}

void State::check(const Event& e) const {
  if (e.seq != last_seq_ + 1) {
    throw ValidationError("expected sequence " + std::to_string(last_seq_ + 1) + ", found " + std::to_string(e.seq));
  }
  try {
    switch (e.kind) {
      case EventKind::segment_submitted: {
        const auto seg = corpus::segment_from_json(e.payload.at("segment"));
        if (segments_.contains(seg.id)) throw ValidationError("segment id " + seg.id + " already exists");
        if (seg.source_text.empty() || seg.target_text.empty()) throw ValidationError("empty segment text");
        break;
      }
      case EventKind::segment_reviewed: {
        const auto id = e.payload.at("id").get<std::string>();
        const auto* entry = find_segment(id);
        if (entry == nullptr) throw ValidationError("review of unknown segment " + id);
        if (entry->segment.status != ReviewStatus::pending) {
          throw ValidationError("segment " + id + " is already " + std::string(corpus::to_string(entry->segment.status)));
        }
        const auto verdict = corpus::parse_status(e.payload.at("verdict").get<std::string>());
        if (verdict == ReviewStatus::pending) throw ValidationError("verdict must be accepted or rejected");
        break;
      }
      case EventKind::phase_advanced: {
        const auto code = e.payload.at("pair").get<std::string>();
        const auto* ps = find_pair(code);
        const int current = ps == nullptr ? corpus::CrisisPhase::kFirst : ps->phase.ordinal();
        if (current == corpus::CrisisPhase::kLast) throw ValidationError(code + " is already at the last phase");
        if (e.payload.at("to").get<int>() != current + 1) throw ValidationError("phase must advance by one");
        break;
      }
      case EventKind::export_created: {
        const auto id = e.payload.at("receipt_id").get<std::string>();
        if (exports_.contains(id)) throw ValidationError("export " + id + " already exists");
        corpus::LanguagePair::parse(e.payload.at("pair").get<std::string>());
        if (!e.payload.at("receipt").is_object()) throw ValidationError("export receipt must be an object");
        break;
      }
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ValidationError(std::string("malformed ") + std::string(to_string(e.kind)) + " payload: " + ex.what());
  } catch (const ParseError& ex) {
    throw ValidationError(ex.what());
  }
}

void State::apply(const Event& e) {
  check(e);
  switch (e.kind) {
    case EventKind::segment_submitted: {
      auto seg = corpus::segment_from_json(e.payload.at("segment"));
      auto& ps = pair_state(seg.pair);
      ps.segment_ids.push_back(seg.id);
      if (seg.status != ReviewStatus::rejected) live_keys_[live_key(seg)].push_back(seg.id);
      const auto id = seg.id;
      segments_.emplace(id, SegmentEntry{std::move(seg), {}, {}, std::nullopt});
      break;
    }
    case EventKind::segment_reviewed: {
      auto& entry = segments_.at(e.payload.at("id").get<std::string>());
      entry.segment.status = corpus::parse_status(e.payload.at("verdict").get<std::string>());
      entry.note = e.payload.value("note", "");
      entry.reviewer = e.payload.value("reviewer", "");
      entry.reviewed_at = e.at;
      if (entry.segment.status == ReviewStatus::rejected) {
        auto it = live_keys_.find(live_key(entry.segment));
        if (it != live_keys_.end()) {
          std::erase(it->second, entry.segment.id);
          if (it->second.empty()) live_keys_.erase(it);
        }
      }
      break;
    }
    case EventKind::phase_advanced: {
      auto& ps = pair_state(corpus::LanguagePair::parse(e.payload.at("pair").get<std::string>()));
      ps.phase = ps.phase.next();
      break;
    }
    case EventKind::export_created: {
      ExportEntry x;
      x.receipt_id = e.payload.at("receipt_id").get<std::string>();
      x.pair = corpus::LanguagePair::parse(e.payload.at("pair").get<std::string>());
      x.created_by = e.payload.value("created_by", "");
      x.created_at = e.at;
      x.options = e.payload.value("options", Json::object());
      x.receipt = e.payload.at("receipt");
      pair_state(x.pair);
      exports_.emplace(x.receipt_id, std::move(x));
      break;
    }
  }
  last_seq_ = e.seq;
}

PairStats State::stats(std::string_view pair_code) const {
  const auto* ps = find_pair(pair_code);
  if (ps == nullptr) throw ValidationError("unknown pair " + std::string(pair_code));
  PairStats out;
  out.pair = ps->pair;
  out.phase = ps->phase;
  std::vector<corpus::Segment> segs;
  std::set<std::string> contributors;
  for (const auto& id : ps->segment_ids) {
    const auto& seg = segments_.at(id).segment;
    segs.push_back(seg);
    contributors.insert(seg.contributor);
    if (!out.last_submission_at || seg.created_at > *out.last_submission_at) out.last_submission_at = seg.created_at;
  }
  out.counts = corpus::compute_stats(segs);
  out.contributors = contributors.size();
  return out;
}

std::vector<corpus::Segment> State::segments(std::string_view pair_code,
                                             std::optional<ReviewStatus> status) const {
  const auto* ps = find_pair(pair_code);
  if (ps == nullptr) throw ValidationError("unknown pair " + std::string(pair_code));
  std::vector<corpus::Segment> out;
  for (const auto& id : ps->segment_ids) {
    const auto& seg = segments_.at(id).segment;
    if (!status || seg.status == *status) out.push_back(seg);
  }
  return out;
}

Json State::to_json() const {
  Json j;
  j["last_seq"] = last_seq_;
  Json pairs = Json::array();
  for (const auto& [code, ps] : pairs_) {
    pairs.push_back({{"pair", code}, {"phase", ps.phase.ordinal()}, {"segment_ids", ps.segment_ids}});
  }
  j["pairs"] = pairs;
  Json segs = Json::array();
  for (const auto& [id, entry] : segments_) {
    Json s;
    s["segment"] = corpus::segment_to_json(entry.segment);
    s["note"] = entry.note;
    s["reviewer"] = entry.reviewer;
    s["reviewed_at"] = entry.reviewed_at ? Json(format_rfc3339(*entry.reviewed_at)) : Json(nullptr);
    segs.push_back(std::move(s));
  }
  j["segments"] = segs;
  Json exports = Json::array();
  for (const auto& [id, x] : exports_) {
    exports.push_back({{"receipt_id", x.receipt_id},
                       {"pair", x.pair.code()},
                       {"created_by", x.created_by},
                       {"created_at", format_rfc3339(x.created_at)},
                       {"options", x.options},
                       {"receipt", x.receipt}});
  }
  j["exports"] = exports;
  return j;
}

State State::from_json(const Json& j) {
  State st;
  try {
    st.last_seq_ = j.at("last_seq").get<std::uint64_t>();
    for (const auto& p : j.at("pairs")) {
      const auto pair = corpus::LanguagePair::parse(p.at("pair").get<std::string>());
      st.pairs_.emplace(pair.code(), PairState{pair, corpus::CrisisPhase::from_ordinal(p.at("phase").get<int>()),
                                               p.at("segment_ids").get<std::vector<std::string>>()});
    }
    for (const auto& s : j.at("segments")) {
      SegmentEntry entry{corpus::segment_from_json(s.at("segment")), s.at("note").get<std::string>(),
                         s.at("reviewer").get<std::string>(), std::nullopt};
      if (!s.at("reviewed_at").is_null()) entry.reviewed_at = parse_rfc3339(s.at("reviewed_at").get<std::string>());
      const auto id = entry.segment.id;
      st.segments_.emplace(id, std::move(entry));
    }
    for (const auto& x : j.at("exports")) {
      ExportEntry e{x.at("receipt_id").get<std::string>(),
                    corpus::LanguagePair::parse(x.at("pair").get<std::string>()),
                    x.at("created_by").get<std::string>(),
                    parse_rfc3339(x.at("created_at").get<std::string>()),
                    x.at("options"),
                    x.at("receipt")};
      const auto id = e.receipt_id;
      st.exports_.emplace(id, std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed state snapshot: ") + e.what());
  }
  for (const auto& [code, ps] : st.pairs_) {
    for (const auto& id : ps.segment_ids) {
      const auto it = st.segments_.find(id);
      if (it == st.segments_.end()) throw ParseError("snapshot lists unknown segment " + id);
      if (it->second.segment.status != ReviewStatus::rejected) {
        st.live_keys_[live_key(it->second.segment)].push_back(id);
      }
    }
  }
  return st;
}

State replay(std::span<const corpus::LanguagePair> pairs, std::span<const Event> events) {
  State st(pairs);
  for (const auto& e : events) st.apply(e);
  return st;
}

}  // namespace crisis::service
