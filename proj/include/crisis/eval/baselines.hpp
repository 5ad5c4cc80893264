#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crisis/common/time.hpp"
#include "crisis/corpus/types.hpp"

namespace crisis::eval {

enum class Provenance { paper_baseline, local_run };
std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view s);

struct RunMetadata {
  std::string backend_fingerprint;
  std::string backend_kind;
  std::string model_name;
  std::string prompt_template;
  std::string testset_fingerprint;
  Timestamp evaluated_at{};
  std::size_t segments_total = 0;
  std::size_t segments_failed = 0;

  bool partial() const noexcept { return segments_failed > 0; }
  friend bool operator==(const RunMetadata&, const RunMetadata&) = default;
};

/// BLEU is on the 0-100 scale; TER and ChrF3 are fractions.
/// Published baselines carry a citation, local runs carry run metadata.
struct SystemRecord {
  std::string system_name;
  corpus::LanguagePair pair;
  double bleu = 0.0;
  double ter = 0.0;
  double chrf3 = 0.0;
  Provenance provenance = Provenance::local_run;
  std::string citation;
  std::optional<RunMetadata> run_metadata;

  std::string direction() const { return pair.code(); }
  friend bool operator==(const SystemRecord&, const SystemRecord&) = default;
};

nlohmann::ordered_json record_to_json(const SystemRecord& r);
SystemRecord record_from_json(const nlohmann::ordered_json& j);

inline constexpr std::string_view kBaselineHeader = "direction\tsystem\tbleu\tter\tchrf3\tprovenance\tcitation";

/// Parses the baseline TSV. Throws ParseError with the offending line.
std::vector<SystemRecord> parse_baselines(std::string_view content);

/// Reads `path` and verifies it against the sha256sum-style sidecar
/// `<path>.sha256`. A missing sidecar or a digest mismatch is an error.
std::vector<SystemRecord> load_baselines(const std::filesystem::path& path);

/// The baseline file shipped with the build.
std::filesystem::path default_baselines_path();

std::vector<SystemRecord> filter_direction(const std::vector<SystemRecord>& records,
                                           std::string_view direction);

}  // namespace crisis::eval
