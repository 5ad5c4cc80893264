#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crisis/corpus/ops.hpp"
#include "crisis/corpus/types.hpp"

namespace crisis::corpus {

using Json = nlohmann::ordered_json;

enum class ExportFormat { jsonl, tsv, bitext };
std::string_view to_string(ExportFormat f);
ExportFormat parse_export_format(std::string_view s);

// JSONL segment schema: {"id","src_lang","tgt_lang","source","target",
// "contributor","stream","phase","status","created_at"} in that order.
Json segment_to_json(const Segment& seg);
/// Throws ParseError (with `line` when nonzero) on a missing or mistyped field.
Segment segment_from_json(const Json& j, std::size_t line = 0);

Json manifest_to_json(const SplitManifest& m);
SplitManifest manifest_from_json(const Json& j);
/// SHA-256 of the compact manifest JSON; identifies corpus, seed, ratios and assignment.
std::string manifest_fingerprint(const SplitManifest& m);
Json dedup_report_to_json(const DedupReport& r);
Json overlap_report_to_json(const OverlapReport& r);
Json finetune_spec_to_json(const FinetuneSpec& spec);

/// Where exported files go. File names are derived from `name`:
/// jsonl -> <name>.jsonl, tsv -> <name>.tsv, bitext -> <name>.<src> and <name>.<tgt>.
struct ExportTarget {
  std::filesystem::path directory;
  std::string name = "corpus";
};

struct ExportedFile {
  std::string file_name;
  std::size_t lines = 0;
  std::string sha256;
};

struct ExportReceipt {
  ExportFormat format = ExportFormat::jsonl;
  std::size_t segment_count = 0;
  std::vector<ExportedFile> files;
  std::optional<std::string> manifest_fingerprint;

  Json to_json() const;
};

/// Renders `corpus` in `format` as in-memory files (file name -> bytes).
/// Throws ValidationError naming the segment when a tsv/bitext field holds
/// a TAB or line break.
std::vector<std::pair<std::string, std::string>> render_export(const Corpus& corpus,
                                                               ExportFormat format,
                                                               const std::string& name);

ExportReceipt export_parallel(const Corpus& corpus, ExportFormat format, const ExportTarget& target);

/// Writes one file set per split, named <name>.<split> (or just <split>
/// when `target.name` is empty).
ExportReceipt export_parallel(const Corpus& corpus, const SplitManifest& manifest,
                              ExportFormat format, const ExportTarget& target);

struct IngestOptions {
  LanguagePair pair;
  Stream stream = Stream::community;
  CrisisPhase phase;
  std::string contributor = "import";
  Timestamp created_at{};
};

/// Loads a corpus file. jsonl records keep every field and must match
/// `options.pair`; tsv and bitext lines become pending segments with ids
/// "<stem>:<line>". For bitext `path` is the shared prefix: <path>.<src> and
/// <path>.<tgt> are read. Texts are normalized; a record that is empty after
/// normalization is malformed.
Corpus ingest_file(const std::filesystem::path& path, ExportFormat format,
                   const IngestOptions& options);

/// Bitext file pair for a prefix: {<prefix>.<src>, <prefix>.<tgt>}.
std::pair<std::filesystem::path, std::filesystem::path> bitext_paths(
    const std::filesystem::path& prefix, const LanguagePair& pair);

std::string read_file(const std::filesystem::path& path);
/// Writes atomically via a temporary file and rename.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace crisis::corpus
