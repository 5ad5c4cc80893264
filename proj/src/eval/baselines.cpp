#include "crisis/eval/baselines.hpp"

#include <charconv>
#include <cmath>

#include "crisis/common/error.hpp"
#include "crisis/common/hash.hpp"
#include "crisis/corpus/io.hpp"

namespace crisis::eval {

using Json = nlohmann::ordered_json;

std::string_view to_string(Provenance p) {
  return p == Provenance::paper_baseline ? "paper_baseline" : "local_run";
}

Provenance parse_provenance(std::string_view s) {
  if (s == "paper_baseline") return Provenance::paper_baseline;
  if (s == "local_run") return Provenance::local_run;
  throw ValidationError("unknown provenance '" + std::string(s) + "'");
}

namespace {

Json metadata_to_json(const RunMetadata& m) {
  Json j;
  j["backend_fingerprint"] = m.backend_fingerprint;
  j["backend_kind"] = m.backend_kind;
  j["model_name"] = m.model_name;
  j["prompt_template"] = m.prompt_template;
  j["testset_fingerprint"] = m.testset_fingerprint;
  j["evaluated_at"] = format_rfc3339(m.evaluated_at);
  j["segments_total"] = m.segments_total;
  j["segments_failed"] = m.segments_failed;
  j["partial"] = m.partial();
  return j;
}

RunMetadata metadata_from_json(const Json& j) {
  RunMetadata m;
  m.backend_fingerprint = j.at("backend_fingerprint").get<std::string>();
  m.backend_kind = j.at("backend_kind").get<std::string>();
  m.model_name = j.at("model_name").get<std::string>();
  m.prompt_template = j.at("prompt_template").get<std::string>();
  m.testset_fingerprint = j.at("testset_fingerprint").get<std::string>();
  m.evaluated_at = parse_rfc3339(j.at("evaluated_at").get<std::string>());
  m.segments_total = j.at("segments_total").get<std::size_t>();
  m.segments_failed = j.at("segments_failed").get<std::size_t>();
  return m;
}

double parse_number(std::string_view field, const char* name, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value) || value < 0) {
    throw ParseError(std::string("invalid ") + name + " '" + std::string(field) + "'", line);
  }
  return value;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

Json record_to_json(const SystemRecord& r) {
  Json j;
  j["system"] = r.system_name;
  j["direction"] = r.direction();
  j["bleu"] = r.bleu;
  j["ter"] = r.ter;
  j["chrf3"] = r.chrf3;
  j["provenance"] = to_string(r.provenance);
  if (!r.citation.empty()) j["citation"] = r.citation;
  if (r.run_metadata) j["run_metadata"] = metadata_to_json(*r.run_metadata);
  return j;
}

SystemRecord record_from_json(const Json& j) {
  try {
    SystemRecord r;
    r.system_name = j.at("system").get<std::string>();
    r.pair = corpus::LanguagePair::parse(j.at("direction").get<std::string>());
    r.bleu = j.at("bleu").get<double>();
    r.ter = j.at("ter").get<double>();
    r.chrf3 = j.at("chrf3").get<double>();
    r.provenance = parse_provenance(j.at("provenance").get<std::string>());
    if (auto it = j.find("citation"); it != j.end()) r.citation = it->get<std::string>();
    if (auto it = j.find("run_metadata"); it != j.end()) r.run_metadata = metadata_from_json(*it);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed system record: ") + e.what());
  }
}

std::vector<SystemRecord> parse_baselines(std::string_view content) {
  std::vector<SystemRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < content.size()) {
    auto end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line != kBaselineHeader) throw ParseError("expected baseline header", line_no);
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto fields = split_tabs(line);
    if (fields.size() != 7) {
      throw ParseError("expected 7 fields, found " + std::to_string(fields.size()), line_no);
    }
    SystemRecord r;
    try {
      r.pair = corpus::LanguagePair::parse(fields[0]);
      r.provenance = parse_provenance(fields[5]);
    } catch (const ValidationError& e) {
      throw ParseError(e.what(), line_no);
    }
    r.system_name = std::string(fields[1]);
    if (r.system_name.empty()) throw ParseError("empty system name", line_no);
    r.bleu = parse_number(fields[2], "bleu", line_no);
    r.ter = parse_number(fields[3], "ter", line_no);
    r.chrf3 = parse_number(fields[4], "chrf3", line_no);
    r.citation = std::string(fields[6]);
    if (r.provenance == Provenance::paper_baseline && r.citation.empty()) {
      throw ParseError("published baseline without citation", line_no);
    }
    out.push_back(std::move(r));
  }
  if (!header_seen) throw ParseError("empty baseline file", 1);
  if (out.empty()) throw ParseError("baseline file has no records", line_no);
  return out;
}

std::vector<SystemRecord> load_baselines(const std::filesystem::path& path) {
  const std::string content = corpus::read_file(path);
  auto sidecar_path = path;
  sidecar_path += ".sha256";
  const std::string sidecar = corpus::read_file(sidecar_path);
  const std::string expected = sidecar.substr(0, sidecar.find_first_of(" \t\n"));
  const std::string actual = hash::sha256_hex(content);
  if (expected != actual) {
    throw ValidationError("checksum mismatch for " + path.string() + ": expected " + expected +
                          ", got " + actual);
  }
  return parse_baselines(content);
}

std::filesystem::path default_baselines_path() {
  return std::filesystem::path(CRISIS_DATA_DIR) / "baselines" / "published_baselines.tsv";
}

std::vector<SystemRecord> filter_direction(const std::vector<SystemRecord>& records,
                                           std::string_view direction) {
  std::vector<SystemRecord> out;
  for (const auto& r : records) {
    if (r.direction() == direction) out.push_back(r);
  }
  return out;
}

}  // namespace crisis::eval
