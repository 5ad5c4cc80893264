#include "crisis/service/service.hpp"

#include <algorithm>
#include <mutex>

#include "crisis/common/hash.hpp"
#include "crisis/common/text.hpp"
#include "crisis/corpus/ops.hpp"
#include "crisis/eval/evaluate.hpp"

namespace crisis::service {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using corpus::ReviewStatus;

Json ApiError::to_json() const {
  Json j;
  j["error"] = code_;
  j["message"] = what();
  for (const auto& [k, v] : details_.items()) j[k] = v;
  return j;
}

Json ExportOptions::to_json() const {
  Json j;
  j["dedup"] = dedup;
  if (ratios) {
    j["ratios"] = Json::array({ratios->train, ratios->validation, ratios->test});
    j["seed"] = seed;
  }
  j["format"] = corpus::to_string(format);
  return j;
}

ExportOptions ExportOptions::from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("export options must be a JSON object");
  ExportOptions o;
  try {
    if (auto it = j.find("dedup"); it != j.end()) o.dedup = it->get<bool>();
    if (auto it = j.find("format"); it != j.end()) o.format = corpus::parse_export_format(it->get<std::string>());
    if (auto it = j.find("seed"); it != j.end()) o.seed = it->get<std::uint64_t>();
    auto it = j.find("ratios");
    if (it == j.end()) it = j.find("split");
    if (it != j.end() && !it->is_null()) {
      corpus::SplitRatios r;
      if (it->is_string()) {
        r = corpus::SplitRatios::parse(it->get<std::string>());
      } else if (it->is_array() && it->size() == 3) {
        r = {(*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>()};
      } else {
        throw ValidationError("ratios must be \"a,b,c\" or a three-element array");
      }
      r.validate();
      o.ratios = r;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed export options: ") + e.what());
  }
  return o;
}

Json segment_entry_to_json(const SegmentEntry& entry) {
  Json j = corpus::segment_to_json(entry.segment);
  j["note"] = entry.note;
  j["reviewer"] = entry.reviewer;
  j["reviewed_at"] = entry.reviewed_at ? Json(format_rfc3339(*entry.reviewed_at)) : Json(nullptr);
  return j;
}

Json export_entry_to_json(const ExportEntry& entry) {
  const std::string base = "/api/exports/" + entry.receipt_id;
  Json j;
  j["receipt_id"] = entry.receipt_id;
  j["pair"] = entry.pair.code();
  j["created_by"] = entry.created_by;
  j["created_at"] = format_rfc3339(entry.created_at);
  j["options"] = entry.options;
  j["receipt"] = entry.receipt;
  j["download_url"] = base;
  Json files = Json::array();
  for (const auto& f : entry.receipt.at("files")) {
    Json file = f;
    file["url"] = base + "/files/" + f.at("file").get<std::string>();
    files.push_back(std::move(file));
  }
  j["files"] = std::move(files);
  return j;
}

CorpusService::CorpusService(ServiceConfig cfg) : cfg_(std::move(cfg)) {
  store_ = std::make_unique<EventStore>(cfg_.store_path, cfg_.pairs,
                                        StoreOptions{cfg_.snapshot_interval, cfg_.sync_writes});
}

RecoveryInfo CorpusService::recovery() const {
  std::shared_lock lock(mutex_);
  return store_->recovery();
}

Principal CorpusService::authenticate(std::string_view token) const {
  if (token.empty()) throw ApiError(401, "unauthorized", "missing bearer token");
  auto it = cfg_.tokens.find(std::string(token));
  if (it == cfg_.tokens.end()) throw ApiError(401, "unauthorized", "unknown bearer token");
  return it->second;
}

void CorpusService::require(const Principal& who, Role role, std::string_view action) const {
  if (static_cast<int>(who.role) < static_cast<int>(role)) {
    throw ApiError(403, "forbidden",
                   std::string(action) + " requires the " + std::string(to_string(role)) + " role");
  }
}

const PairState& CorpusService::known_pair(std::string_view pair_code, int missing_status) const {
  const auto* ps = store_->state().find_pair(pair_code);
  if (ps == nullptr) {
    throw ApiError(missing_status, missing_status == 404 ? "not_found" : "unprocessable",
                   "unknown language pair '" + std::string(pair_code) + "'");
  }
  return *ps;
}

std::string CorpusService::submit_segment(const Principal& who, std::string_view pair_code,
                                          const SubmitRequest& req) {
  require(who, Role::contributor, "submitting segments");
  corpus::Segment seg;
  try {
    seg.source_text = text::normalize_text(req.source_text);
    seg.target_text = text::normalize_text(req.target_text);
  } catch (const EncodingError& e) {
    throw ApiError(422, "unprocessable", e.what());
  }
  if (seg.source_text.empty()) throw ApiError(422, "unprocessable", "source text is empty");
  if (seg.target_text.empty()) throw ApiError(422, "unprocessable", "target text is empty");

  std::unique_lock lock(mutex_);
  const auto& ps = known_pair(pair_code, 422);
  seg.pair = ps.pair;
  if (auto existing = store_->state().live_duplicate(seg)) {
    throw ApiError(409, "duplicate", "an identical segment already exists", Json{{"existing_id", *existing}});
  }
  const auto at = now_utc();
  seg.id = "seg-" + std::to_string(store_->state().last_seq() + 1);
  seg.contributor = who.name;
  seg.stream = req.stream;
  seg.phase = ps.phase;
  seg.status = ReviewStatus::pending;
  seg.created_at = at;
  store_->append(EventKind::segment_submitted, Json{{"segment", corpus::segment_to_json(seg)}, {"imported", false}},
                 at);
  return seg.id;
}

SegmentEntry CorpusService::review_segment(const Principal& who, std::string_view id, std::string_view verdict,
                                           std::string note) {
  require(who, Role::reviewer, "reviewing segments");
  ReviewStatus status;
  try {
    status = corpus::parse_status(verdict);
  } catch (const ValidationError&) {
    status = ReviewStatus::pending;
  }
  if (status == ReviewStatus::pending) {
    throw ApiError(422, "unprocessable", "verdict must be 'accepted' or 'rejected'");
  }
  std::unique_lock lock(mutex_);
  const auto* entry = store_->state().find_segment(id);
  if (entry == nullptr) throw ApiError(404, "not_found", "no segment '" + std::string(id) + "'");
  if (entry->segment.status != ReviewStatus::pending) {
    throw ApiError(409, "already_reviewed",
                   "segment is already " + std::string(corpus::to_string(entry->segment.status)),
                   Json{{"status", corpus::to_string(entry->segment.status)}});
  }
  store_->append(EventKind::segment_reviewed,
                 Json{{"id", std::string(id)}, {"verdict", corpus::to_string(status)}, {"note", std::move(note)},
                      {"reviewer", who.name}});
  return *store_->state().find_segment(id);
}

corpus::CrisisPhase CorpusService::advance_phase(const Principal& who, std::string_view pair_code) {
  require(who, Role::coordinator, "advancing the crisis phase");
  std::unique_lock lock(mutex_);
  const auto& ps = known_pair(pair_code, 404);
  if (ps.phase.is_last()) {
    throw ApiError(409, "last_phase", ps.pair.code() + " is already at the last phase",
                   Json{{"phase", ps.phase.ordinal()}});
  }
  const int from = ps.phase.ordinal();
  store_->append(EventKind::phase_advanced,
                 Json{{"pair", ps.pair.code()}, {"from", from}, {"to", from + 1}, {"by", who.name}});
  return store_->state().find_pair(pair_code)->phase;
}

ExportEntry CorpusService::create_export(const Principal& who, std::string_view pair_code,
                                         const ExportOptions& options) {
  require(who, Role::coordinator, "creating exports");
  std::unique_lock lock(mutex_);
  const auto& ps = known_pair(pair_code, 404);
  corpus::Corpus corpus{ps.pair, store_->state().segments(pair_code, ReviewStatus::accepted)};
  if (corpus.empty()) throw ApiError(422, "unprocessable", "no accepted segments to export");
  std::optional<corpus::DedupReport> dedup_report;
  if (options.dedup) {
    auto [deduped, report] = corpus::deduplicate(corpus);
    corpus = std::move(deduped);
    dedup_report = std::move(report);
  }
  std::optional<corpus::SplitManifest> manifest;
  if (options.ratios) {
    try {
      manifest = corpus::split(corpus, *options.ratios, options.seed);
    } catch (const ValidationError& e) {
      throw ApiError(422, "unprocessable", e.what());
    }
  }

  const auto at = now_utc();
  const std::string receipt_id = "exp-" + std::to_string(store_->state().last_seq() + 1);
  const auto final_dir = store_->exports_dir() / receipt_id;
  const auto tmp_dir = store_->exports_dir() / ("." + receipt_id + ".tmp");
  std::error_code ec;
  fs::remove_all(tmp_dir, ec);
  fs::remove_all(final_dir, ec);
  fs::create_directories(tmp_dir, ec);
  if (ec) throw IoError("cannot create " + tmp_dir.string() + ": " + ec.message());

  corpus::ExportReceipt receipt;
  try {
    const corpus::ExportTarget target{tmp_dir, ps.pair.code()};
    receipt = manifest ? corpus::export_parallel(corpus, *manifest, options.format, target)
                       : corpus::export_parallel(corpus, options.format, target);
    auto add_json = [&](const std::string& name, const Json& j) {
      const std::string content = j.dump(2) + "\n";
      corpus::write_file(tmp_dir / name, content);
      receipt.files.push_back({name, static_cast<std::size_t>(std::count(content.begin(), content.end(), '\n')),
                               hash::sha256_hex(content)});
    };
    if (manifest) add_json("manifest.json", corpus::manifest_to_json(*manifest));
    if (dedup_report) add_json("dedup_report.json", corpus::dedup_report_to_json(*dedup_report));
    fs::rename(tmp_dir, final_dir);
  } catch (const ValidationError& e) {
    fs::remove_all(tmp_dir, ec);
    throw ApiError(422, "unprocessable", e.what());
  } catch (...) {
    fs::remove_all(tmp_dir, ec);
    throw;
  }

  try {
    store_->append(EventKind::export_created,
                   Json{{"receipt_id", receipt_id},
                        {"pair", ps.pair.code()},
                        {"created_by", who.name},
                        {"options", options.to_json()},
                        {"receipt", receipt.to_json()}},
                   at);
  } catch (...) {
    fs::remove_all(final_dir, ec);
    throw;
  }
  return *store_->state().find_export(receipt_id);
}

std::size_t CorpusService::import_segments(const corpus::Corpus& corpus) {
  std::unique_lock lock(mutex_);
  for (const auto& seg : corpus.segments) {
    if (store_->state().find_segment(seg.id) != nullptr) {
      throw ValidationError("segment id '" + seg.id + "' already exists in the store");
    }
  }
  for (auto seg : corpus.segments) {
    seg.source_line.reset();
    store_->append(EventKind::segment_submitted, Json{{"segment", corpus::segment_to_json(seg)}, {"imported", true}});
  }
  return corpus.segments.size();
}

PairStats CorpusService::stats(std::string_view pair_code) const {
  std::shared_lock lock(mutex_);
  known_pair(pair_code, 404);
  return store_->state().stats(pair_code);
}

std::vector<corpus::Segment> CorpusService::list_segments(std::string_view pair_code,
                                                          std::optional<ReviewStatus> status) const {
  std::shared_lock lock(mutex_);
  known_pair(pair_code, 404);
  return store_->state().segments(pair_code, status);
}

SegmentEntry CorpusService::get_segment(std::string_view id) const {
  std::shared_lock lock(mutex_);
  const auto* entry = store_->state().find_segment(id);
  if (entry == nullptr) throw ApiError(404, "not_found", "no segment '" + std::string(id) + "'");
  return *entry;
}

ExportEntry CorpusService::get_export(std::string_view receipt_id) const {
  std::shared_lock lock(mutex_);
  const auto* entry = store_->state().find_export(receipt_id);
  if (entry == nullptr) throw ApiError(404, "not_found", "no export '" + std::string(receipt_id) + "'");
  return *entry;
}

std::string CorpusService::export_file(std::string_view receipt_id, std::string_view file_name) const {
  const auto entry = get_export(receipt_id);
  for (const auto& f : entry.receipt.at("files")) {
    if (f.at("file").get<std::string>() != file_name) continue;
    const std::string content = corpus::read_file(store_->exports_dir() / entry.receipt_id / std::string(file_name));
    if (hash::sha256_hex(content) != f.at("sha256").get<std::string>()) {
      throw ApiError(500, "integrity", "export file " + std::string(file_name) + " no longer matches its receipt");
    }
    return content;
  }
  throw ApiError(404, "not_found", "export " + std::string(receipt_id) + " has no file '" + std::string(file_name) + "'");
}

std::vector<PairState> CorpusService::pairs() const {
  std::shared_lock lock(mutex_);
  std::vector<PairState> out;
  for (const auto& [code, ps] : store_->state().pairs()) out.push_back(ps);
  return out;
}

eval::Leaderboard CorpusService::leaderboard(std::string_view direction, std::optional<std::string> reference) const {
  std::vector<eval::SystemRecord> records;
  const auto baselines = cfg_.baselines_path.value_or(eval::default_baselines_path());
  std::error_code ec;
  if (fs::exists(baselines, ec)) records = eval::filter_direction(eval::load_baselines(baselines), direction);
  if (cfg_.runs_dir) {
    for (auto& r : eval::load_run_records(*cfg_.runs_dir)) {
      if (r.direction() == direction) records.push_back(std::move(r));
    }
  }
  if (records.empty()) throw ApiError(404, "not_found", "no systems for direction '" + std::string(direction) + "'");
  if (!reference) {
    const eval::SystemRecord* lowest = nullptr;
    for (const auto& r : records) {
      const bool better = lowest == nullptr || (lowest->provenance != eval::Provenance::paper_baseline &&
                                                r.provenance == eval::Provenance::paper_baseline) ||
                          (lowest->provenance == r.provenance && r.bleu < lowest->bleu);
      if (better) lowest = &r;
    }
    reference = lowest->system_name;
  }
  try {
    return eval::build_leaderboard(records, *reference);
  } catch (const ValidationError& e) {
    throw ApiError(422, "unprocessable", e.what());
  }
}

State CorpusService::snapshot() const {
  std::shared_lock lock(mutex_);
  return store_->state();
}

std::vector<Event> CorpusService::read_log() const {
  std::shared_lock lock(mutex_);
  return read_event_log(store_->dir());
}

}  // namespace crisis::service
