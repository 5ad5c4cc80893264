#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crisis/eval/baselines.hpp"

namespace crisis::eval {

struct LeaderboardRow {
  SystemRecord record;
  /// BLEU minus the reference row's BLEU.
  double delta = 0.0;
  /// (bleu - ref) / ref as a fraction; 0 when the reference BLEU is 0.
  double relative = 0.0;
};

struct Leaderboard {
  std::string direction;
  std::string reference_system;
  std::vector<LeaderboardRow> rows;

  const LeaderboardRow& row(std::string_view system_name) const;
};

/// Rows sorted by BLEU descending, ties by system name.
/// Throws ValidationError on empty input, mixed directions, or a reference
/// system that is absent or ambiguous.
Leaderboard build_leaderboard(std::span<const SystemRecord> records, std::string_view reference_system);

enum class ReportFormat { markdown, json };
ReportFormat parse_report_format(std::string_view s);

nlohmann::ordered_json leaderboard_to_json(const Leaderboard& lb);

/// Markdown columns: System | BLEU | TER | ChrF3 | Δ | Rel%.
std::string render_report(const Leaderboard& lb, ReportFormat format);

}  // namespace crisis::eval
