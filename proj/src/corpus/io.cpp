#include "crisis/corpus/io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "crisis/common/error.hpp"
#include "crisis/common/hash.hpp"
#include "crisis/common/text.hpp"

namespace crisis::corpus {

namespace fs = std::filesystem;

std::string_view to_string(ExportFormat f) {
  switch (f) {
    case ExportFormat::jsonl: return "jsonl";
    case ExportFormat::tsv: return "tsv";
    case ExportFormat::bitext: return "bitext";
  }
  return "jsonl";
}

ExportFormat parse_export_format(std::string_view s) {
  for (ExportFormat f : {ExportFormat::jsonl, ExportFormat::tsv, ExportFormat::bitext}) {
    if (to_string(f) == s) return f;
  }
  throw ValidationError("unknown format '" + std::string(s) + "' (expected jsonl, tsv or bitext)");
}

Json segment_to_json(const Segment& seg) {
  Json j;
  j["id"] = seg.id;
  j["src_lang"] = seg.pair.source();
  j["tgt_lang"] = seg.pair.target();
  j["source"] = seg.source_text;
  j["target"] = seg.target_text;
  j["contributor"] = seg.contributor;
  j["stream"] = to_string(seg.stream);
  j["phase"] = seg.phase.ordinal();
  j["status"] = to_string(seg.status);
  j["created_at"] = format_rfc3339(seg.created_at);
  return j;
}

namespace {

template <class T>
T field(const Json& j, const char* name, std::size_t line) {
  auto it = j.find(name);
  if (it == j.end()) throw ParseError(std::string("missing field '") + name + "'", line);
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(std::string("field '") + name + "' has the wrong type", line);
  }
}

}  // namespace

Segment segment_from_json(const Json& j, std::size_t line) {
  if (!j.is_object()) throw ParseError("segment record must be a JSON object", line);
  try {
    Segment seg;
    seg.id = field<std::string>(j, "id", line);
    seg.pair = LanguagePair(field<std::string>(j, "src_lang", line),
                            field<std::string>(j, "tgt_lang", line));
    seg.source_text = field<std::string>(j, "source", line);
    seg.target_text = field<std::string>(j, "target", line);
    seg.contributor = field<std::string>(j, "contributor", line);
    seg.stream = parse_stream(field<std::string>(j, "stream", line));
    seg.phase = CrisisPhase::from_ordinal(field<int>(j, "phase", line));
    seg.status = parse_status(field<std::string>(j, "status", line));
    seg.created_at = parse_rfc3339(field<std::string>(j, "created_at", line));
    if (seg.id.empty()) throw ParseError("empty segment id", line);
    return seg;
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), line);
  }
}

Json manifest_to_json(const SplitManifest& m) {
  Json j;
  j["corpus_fingerprint"] = m.corpus_fingerprint;
  j["seed"] = m.seed;
  j["ratios"] = Json::array({m.ratios.train, m.ratios.validation, m.ratios.test});
  Json counts;
  for (SplitName s : kAllSplits) counts[std::string(to_string(s))] = m.count(s);
  j["counts"] = counts;
  Json assignments = Json::object();
  for (const auto& [id, split] : m.assignments) assignments[id] = to_string(split);
  j["assignments"] = assignments;
  return j;
}

std::string manifest_fingerprint(const SplitManifest& m) { return hash::sha256_hex(manifest_to_json(m).dump()); }

SplitManifest manifest_from_json(const Json& j) {
  SplitManifest m;
  try {
    m.corpus_fingerprint = j.at("corpus_fingerprint").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto& r = j.at("ratios");
    if (!r.is_array() || r.size() != 3) throw ParseError("manifest ratios must have 3 entries");
    m.ratios = {r[0].get<double>(), r[1].get<double>(), r[2].get<double>()};
    for (const auto& [id, split] : j.at("assignments").items()) {
      m.assignments.emplace(id, parse_split_name(split.get<std::string>()));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed split manifest: ") + e.what());
  }
  return m;
}

Json dedup_report_to_json(const DedupReport& r) {
  Json removals = Json::array();
  for (const auto& rm : r.removals) {
    removals.push_back(Json{{"removed_id", rm.removed_id}, {"surviving_id", rm.surviving_id}});
  }
  Json j;
  j["removed"] = r.removals.size();
  j["removals"] = removals;
  return j;
}

Json overlap_report_to_json(const OverlapReport& r) {
  const auto hits = [](const std::vector<OverlapHit>& v) {
    Json a = Json::array();
    for (const auto& h : v) a.push_back(Json{{"train_id", h.train_id}, {"test_id", h.test_id}});
    return a;
  };
  Json j;
  j["source_overlaps"] = r.source_hits.size();
  j["pair_overlaps"] = r.pair_hits.size();
  j["source_hits"] = hits(r.source_hits);
  j["pair_hits"] = hits(r.pair_hits);
  return j;
}

Json finetune_spec_to_json(const FinetuneSpec& spec) {
  Json j;
  j["epochs"] = spec.epochs;
  j["batch_size"] = spec.batch_size;
  j["gradient_steps"] = spec.gradient_steps;
  j["learning_rate"] = spec.learning_rate;
  j["weight_decay"] = spec.weight_decay;
  j["mixed_precision"] = spec.mixed_precision;
  j["notes"] = spec.notes;
  return j;
}

Json ExportReceipt::to_json() const {
  Json j;
  j["format"] = to_string(format);
  j["segment_count"] = segment_count;
  Json list = Json::array();
  for (const auto& f : files) {
    list.push_back(Json{{"file", f.file_name}, {"lines", f.lines}, {"sha256", f.sha256}});
  }
  j["files"] = list;
  if (manifest_fingerprint) j["manifest_fingerprint"] = *manifest_fingerprint;
  return j;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path.string());
  return buf.str();
}

void write_file(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::pair<fs::path, fs::path> bitext_paths(const fs::path& prefix, const LanguagePair& pair) {
  fs::path src = prefix;
  src += "." + pair.source();
  fs::path tgt = prefix;
  tgt += "." + pair.target();
  return {src, tgt};
}

namespace {

void check_plain_line(const Segment& seg, std::string_view format) {
  for (const std::string* text : {&seg.source_text, &seg.target_text}) {
    if (text->find_first_of("\t\n\r") != std::string::npos) {
      throw ValidationError("segment " + seg.id + " contains a TAB or line break and cannot be " +
                            "written as " + std::string(format));
    }
  }
}

std::size_t count_lines(std::string_view content) {
  return static_cast<std::size_t>(std::count(content.begin(), content.end(), '\n'));
}

ExportReceipt write_rendered(const std::vector<std::pair<std::string, std::string>>& rendered,
                             const fs::path& directory, ExportReceipt receipt) {
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw IoError("cannot create " + directory.string() + ": " + ec.message());
  for (const auto& [file_name, content] : rendered) {
    write_file(directory / file_name, content);
    receipt.files.push_back({file_name, count_lines(content), hash::sha256_hex(content)});
  }
  return receipt;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> render_export(const Corpus& corpus,
                                                               ExportFormat format,
                                                               const std::string& name) {
  std::vector<std::pair<std::string, std::string>> out;
  switch (format) {
    case ExportFormat::jsonl: {
      std::string body;
      for (const Segment& s : corpus.segments) {
        body += segment_to_json(s).dump();
        body.push_back('\n');
      }
      out.emplace_back(name + ".jsonl", std::move(body));
      break;
    }
    case ExportFormat::tsv: {
      std::string body;
      for (const Segment& s : corpus.segments) {
        check_plain_line(s, "tsv");
        body += s.source_text + '\t' + s.target_text + '\n';
      }
      out.emplace_back(name + ".tsv", std::move(body));
      break;
    }
    case ExportFormat::bitext: {
      if (!corpus.pair.is_set() && !corpus.empty()) {
        throw ValidationError("bitext export needs a language pair");
      }
      const std::string src_ext = corpus.pair.is_set() ? corpus.pair.source() : "src";
      const std::string tgt_ext = corpus.pair.is_set() ? corpus.pair.target() : "tgt";
      std::string src;
      std::string tgt;
      for (const Segment& s : corpus.segments) {
        check_plain_line(s, "bitext");
        src += s.source_text + '\n';
        tgt += s.target_text + '\n';
      }
      out.emplace_back(name + "." + src_ext, std::move(src));
      out.emplace_back(name + "." + tgt_ext, std::move(tgt));
      break;
    }
  }
  return out;
}

ExportReceipt export_parallel(const Corpus& corpus, ExportFormat format, const ExportTarget& target) {
  ExportReceipt receipt;
  receipt.format = format;
  receipt.segment_count = corpus.size();
  return write_rendered(render_export(corpus, format, target.name), target.directory,
                        std::move(receipt));
}

ExportReceipt export_parallel(const Corpus& corpus, const SplitManifest& manifest,
                              ExportFormat format, const ExportTarget& target) {
  std::vector<std::pair<std::string, std::string>> rendered;
  std::size_t total = 0;
  for (SplitName which : kAllSplits) {
    const Corpus part = select_split(corpus, manifest, which);
    total += part.size();
    const std::string name = target.name.empty()
                                 ? std::string(to_string(which))
                                 : target.name + "." + std::string(to_string(which));
    for (auto& file : render_export(part, format, name)) rendered.push_back(std::move(file));
  }
  if (total != manifest.assignments.size()) {
    throw ValidationError("manifest assigns " + std::to_string(manifest.assignments.size()) +
                          " segments but only " + std::to_string(total) +
                          " were found in the corpus");
  }
  ExportReceipt receipt;
  receipt.format = format;
  receipt.segment_count = total;
  receipt.manifest_fingerprint = manifest_fingerprint(manifest);
  return write_rendered(rendered, target.directory, std::move(receipt));
}

namespace {

std::vector<std::string> split_lines(const std::string& content) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = end + 1;
  }
  return lines;
}

std::string normalized_field(std::string_view raw, const char* what, std::size_t line) {
  std::string out;
  try {
    out = text::normalize_text(raw);
  } catch (const EncodingError& e) {
    throw ParseError(std::string(what) + ": " + e.what(), line);
  }
  if (out.empty()) throw ParseError(std::string(what) + " is empty", line);
  return out;
}

Segment plain_segment(const IngestOptions& opt, const std::string& stem, std::size_t line,
                      std::string_view src, std::string_view tgt) {
  Segment seg;
  seg.id = stem + ":" + std::to_string(line);
  seg.pair = opt.pair;
  seg.source_text = normalized_field(src, "source text", line);
  seg.target_text = normalized_field(tgt, "target text", line);
  seg.contributor = opt.contributor;
  seg.stream = opt.stream;
  seg.phase = opt.phase;
  seg.status = ReviewStatus::pending;
  seg.created_at = opt.created_at;
  seg.source_line = line;
  return seg;
}

}  // namespace

Corpus ingest_file(const fs::path& path, ExportFormat format, const IngestOptions& options) {
  if (!options.pair.is_set()) throw ValidationError("ingest needs a language pair");
  Corpus corpus{options.pair, {}};

  switch (format) {
    case ExportFormat::jsonl: {
      const auto lines = split_lines(read_file(path));
      for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line = i + 1;
        if (lines[i].empty()) continue;
        Json j;
        try {
          j = Json::parse(lines[i]);
        } catch (const nlohmann::json::parse_error& e) {
          throw ParseError(std::string("invalid JSON: ") + e.what(), line);
        }
        Segment seg = segment_from_json(j, line);
        if (seg.pair != options.pair) {
          throw ParseError("record language pair " + seg.pair.code() + " does not match " +
                               options.pair.code(),
                           line);
        }
        seg.source_text = normalized_field(seg.source_text, "source text", line);
        seg.target_text = normalized_field(seg.target_text, "target text", line);
        seg.source_line = line;
        corpus.segments.push_back(std::move(seg));
      }
      break;
    }
    case ExportFormat::tsv: {
      const auto lines = split_lines(read_file(path));
      const std::string stem = path.stem().string();
      for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t line = i + 1;
        const auto tab = lines[i].find('\t');
        if (tab == std::string::npos || lines[i].find('\t', tab + 1) != std::string::npos) {
          throw ParseError("expected exactly two TAB-separated fields", line);
        }
        corpus.segments.push_back(plain_segment(options, stem, line,
                                                std::string_view(lines[i]).substr(0, tab),
                                                std::string_view(lines[i]).substr(tab + 1)));
      }
      break;
    }
    case ExportFormat::bitext: {
      const auto [src_path, tgt_path] = bitext_paths(path, options.pair);
      const auto src = split_lines(read_file(src_path));
      const auto tgt = split_lines(read_file(tgt_path));
      const std::string stem = path.filename().string();
      const std::size_t common = std::min(src.size(), tgt.size());
      if (src.size() != tgt.size()) {
        const bool src_longer = src.size() > tgt.size();
        throw ParseError("bitext misaligned: " +
                             (src_longer ? src_path : tgt_path).filename().string() +
                             " continues after " +
                             (src_longer ? tgt_path : src_path).filename().string() +
                             " ended at line " + std::to_string(common),
                         common + 1);
      }
      for (std::size_t i = 0; i < common; ++i) {
        corpus.segments.push_back(plain_segment(options, stem, i + 1, src[i], tgt[i]));
      }
      break;
    }
  }
  return corpus;
}

}  // namespace crisis::corpus
