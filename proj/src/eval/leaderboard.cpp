#include "crisis/eval/leaderboard.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "crisis/common/error.hpp"

namespace crisis::eval {

using Json = nlohmann::ordered_json;

const LeaderboardRow& Leaderboard::row(std::string_view system_name) const {
  for (const auto& r : rows) {
    if (r.record.system_name == system_name) return r;
  }
  throw ValidationError("no system '" + std::string(system_name) + "' on the " + direction + " leaderboard");
}

Leaderboard build_leaderboard(std::span<const SystemRecord> records, std::string_view reference_system) {
  if (records.empty()) throw ValidationError("cannot build a leaderboard from no records");
  Leaderboard lb;
  lb.direction = records.front().direction();
  lb.reference_system = std::string(reference_system);
  const SystemRecord* reference = nullptr;
  for (const auto& r : records) {
    if (r.direction() != lb.direction) {
      throw ValidationError("record '" + r.system_name + "' is " + r.direction() + ", expected " + lb.direction);
    }
    if (r.system_name == reference_system) {
      if (reference != nullptr) {
        throw ValidationError("reference system '" + std::string(reference_system) + "' appears twice");
      }
      reference = &r;
    }
  }
  if (reference == nullptr) {
    throw ValidationError("reference system '" + std::string(reference_system) + "' not among " +
                          lb.direction + " records");
  }
  const double ref_bleu = reference->bleu;
  lb.rows.reserve(records.size());
  for (const auto& r : records) {
    const double delta = r.bleu - ref_bleu;
    lb.rows.push_back({r, delta, ref_bleu == 0.0 ? 0.0 : delta / ref_bleu});
  }
  std::stable_sort(lb.rows.begin(), lb.rows.end(), [](const LeaderboardRow& a, const LeaderboardRow& b) {
    if (a.record.bleu != b.record.bleu) return a.record.bleu > b.record.bleu;
    return a.record.system_name < b.record.system_name;
  });
  return lb;
}

ReportFormat parse_report_format(std::string_view s) {
  if (s == "markdown" || s == "md") return ReportFormat::markdown;
  if (s == "json") return ReportFormat::json;
  throw ValidationError("unknown report format '" + std::string(s) + "'");
}

Json leaderboard_to_json(const Leaderboard& lb) {
  Json j;
  j["direction"] = lb.direction;
  j["reference_system"] = lb.reference_system;
  Json rows = Json::array();
  for (const auto& row : lb.rows) {
    Json r = record_to_json(row.record);
    r["delta"] = row.delta;
    r["relative"] = row.relative;
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

namespace {

std::string signed_fixed(double value, int decimals) {
  // Avoid "-0.0" for deltas that round to zero.
  const double scale = std::pow(10.0, decimals);
  if (std::round(value * scale) == 0.0) value = 0.0;
  return fmt::format("{:+.{}f}", value, decimals);
}

}  // namespace

std::string render_report(const Leaderboard& lb, ReportFormat format) {
  if (format == ReportFormat::json) return leaderboard_to_json(lb).dump(2) + "\n";
  std::string out = fmt::format("{} (reference: {})\n\n", lb.direction, lb.reference_system);
  out += "| System | BLEU | TER | ChrF3 | Δ | Rel% |\n";
  out += "|---|---:|---:|---:|---:|---:|\n";
  for (const auto& row : lb.rows) {
    const auto& r = row.record;
    out += fmt::format("| {} | {:.1f} | {:.3f} | {:.3f} | {} | {} |\n", r.system_name, r.bleu, r.ter, r.chrf3,
                       signed_fixed(row.delta, 1), signed_fixed(row.relative * 100.0, 1));
  }
  return out;
}

}  // namespace crisis::eval
