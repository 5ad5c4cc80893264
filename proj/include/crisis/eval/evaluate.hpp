#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "crisis/backends/translate.hpp"
#include "crisis/eval/baselines.hpp"
#include "crisis/metrics/report.hpp"

namespace crisis::eval {

struct EvaluationOptions {
  /// Run artifacts go to <output_dir>/<system name>/. Nothing is written when unset.
  std::optional<std::filesystem::path> output_dir;
  backends::BatchOptions batch;
  metrics::MetricsConfig metrics;
};

struct Evaluation {
  SystemRecord record;
  metrics::ScoreReport report;
  std::vector<backends::TranslationResult> results;
  /// Ids of segments excluded from scoring.
  std::vector<std::string> failed_ids;
  std::optional<std::filesystem::path> run_dir;
};

/// Translates every source, scores the successful hypotheses against their
/// references and, when an output directory is set, persists
/// hypotheses.<src>/hypotheses.<tgt> bitext plus a record.json sidecar.
/// Throws ValidationError on an empty testset or name and BackendError when
/// every segment fails.
Evaluation evaluate_system(const backends::BackendConfig& cfg, std::span<const corpus::Segment> testset,
                           const std::string& name, const EvaluationOptions& options = {});

/// Local-run records persisted under `runs_dir`, ordered by system name.
std::vector<SystemRecord> load_run_records(const std::filesystem::path& runs_dir);

/// File-system-safe form of a system name.
std::string run_dir_name(std::string_view system_name);

}  // namespace crisis::eval
