#include "crisis/eval/evaluate.hpp"

#include <algorithm>

#include "crisis/common/error.hpp"
#include "crisis/common/text.hpp"
#include "crisis/corpus/io.hpp"
#include "crisis/corpus/ops.hpp"

namespace crisis::eval {

using Json = nlohmann::ordered_json;

std::string run_dir_name(std::string_view system_name) {
  std::string out;
  for (char c : system_name) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '-' || c == '_' || c == '.';
    out.push_back(safe ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

Evaluation evaluate_system(const backends::BackendConfig& cfg, std::span<const corpus::Segment> testset,
                           const std::string& name, const EvaluationOptions& options) {
  if (testset.empty()) throw ValidationError("testset is empty");
  if (name.empty()) throw ValidationError("system name is empty");

  Evaluation ev;
  ev.results = backends::translate_batch(cfg, testset, options.batch);

  std::vector<std::string> hypotheses;
  std::vector<std::string> references;
  std::vector<std::string> sources;
  for (std::size_t i = 0; i < testset.size(); ++i) {
    auto& result = ev.results[i];
    if (result.hypothesis) {
      try {
        hypotheses.push_back(text::normalize_text(*result.hypothesis));
      } catch (const EncodingError& e) {
        result.error = std::string("undecodable hypothesis: ") + e.what();
        result.hypothesis.reset();
      }
    }
    if (!result.hypothesis) {
      ev.failed_ids.push_back(testset[i].id);
      continue;
    }
    references.push_back(testset[i].target_text);
    sources.push_back(testset[i].source_text);
  }
  if (hypotheses.empty()) {
    const auto& first = ev.results.front();
    throw BackendError("all " + std::to_string(testset.size()) + " segments failed; first error: " +
                       first.error.value_or("unknown"));
  }

  ev.report = metrics::score_all(hypotheses, references, options.metrics);

  RunMetadata meta;
  meta.backend_fingerprint = cfg.fingerprint();
  meta.backend_kind = std::string(backends::to_string(cfg.kind));
  meta.model_name = cfg.model_name;
  meta.prompt_template = cfg.prompt_template;
  meta.testset_fingerprint = corpus::corpus_fingerprint(testset);
  meta.evaluated_at = now_utc();
  meta.segments_total = testset.size();
  meta.segments_failed = ev.failed_ids.size();

  auto& rec = ev.record;
  rec.system_name = name;
  rec.pair = testset.front().pair;
  rec.bleu = ev.report.bleu.value;
  rec.ter = ev.report.ter.value;
  rec.chrf3 = ev.report.chrf.value;
  rec.provenance = Provenance::local_run;
  rec.run_metadata = meta;

  if (options.output_dir) {
    const auto dir = *options.output_dir / run_dir_name(name);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    std::string src_text;
    std::string hyp_text;
    for (std::size_t i = 0; i < hypotheses.size(); ++i) {
      src_text += sources[i] + "\n";
      hyp_text += hypotheses[i] + "\n";
    }
    const auto [src_path, hyp_path] = corpus::bitext_paths(dir / "hypotheses", rec.pair);
    corpus::write_file(src_path, src_text);
    corpus::write_file(hyp_path, hyp_text);
    Json sidecar;
    sidecar["record"] = record_to_json(rec);
    sidecar["scores"] = ev.report.to_json();
    sidecar["backend"] = cfg.to_json();
    sidecar["failed_segments"] = ev.failed_ids;
    corpus::write_file(dir / "record.json", sidecar.dump(2) + "\n");
    ev.run_dir = dir;
  }
  return ev;
}

std::vector<SystemRecord> load_run_records(const std::filesystem::path& runs_dir) {
  std::vector<SystemRecord> out;
  std::error_code ec;
  if (!std::filesystem::is_directory(runs_dir, ec)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(runs_dir)) {
    const auto path = entry.path() / "record.json";
    if (!std::filesystem::is_regular_file(path, ec)) continue;
    Json j;
    try {
      j = Json::parse(corpus::read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": " + e.what());
    }
    if (!j.contains("record")) throw ParseError(path.string() + ": missing record");
    out.push_back(record_from_json(j["record"]));
  }
  std::sort(out.begin(), out.end(),
            [](const SystemRecord& a, const SystemRecord& b) { return a.system_name < b.system_name; });
  return out;
}

}  // namespace crisis::eval
