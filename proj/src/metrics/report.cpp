#include "crisis/metrics/report.hpp"

#include <cmath>

namespace crisis::metrics {

using Json = nlohmann::ordered_json;

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::bleu: return "bleu";
    case MetricKind::ter: return "ter";
    case MetricKind::chrf: return "chrf";
  }
  return "bleu";
}

namespace {

Json number_or_null(double v) { return std::isnan(v) ? Json(nullptr) : Json(v); }

struct ComponentsVisitor {
  Json operator()(const BleuComponents& c) const {
    Json j;
    j["precisions"] = c.precisions;
    j["matches"] = c.matches;
    j["totals"] = c.totals;
    j["brevity_penalty"] = c.brevity_penalty;
    j["hypothesis_length"] = c.hypothesis_length;
    j["reference_length"] = c.reference_length;
    j["effective_order"] = c.effective_order;
    return j;
  }
  Json operator()(const TerComponents& c) const {
    Json j;
    j["edits"] = c.edits;
    j["shifts"] = c.shifts;
    j["insertions"] = c.insertions;
    j["deletions"] = c.deletions;
    j["substitutions"] = c.substitutions;
    j["reference_length"] = c.reference_length;
    return j;
  }
  Json operator()(const ChrfComponents& c) const {
    Json p = Json::array();
    Json r = Json::array();
    for (double v : c.precisions) p.push_back(number_or_null(v));
    for (double v : c.recalls) r.push_back(number_or_null(v));
    Json j;
    j["precisions"] = p;
    j["recalls"] = r;
    j["char_precision"] = c.char_precision;
    j["char_recall"] = c.char_recall;
    return j;
  }
};

}  // namespace

Json components_to_json(const MetricScore& score) {
  return std::visit(ComponentsVisitor{}, score.components);
}

ScoreReport score_all(std::span<const std::string> hypotheses,
                      std::span<const std::string> references, const MetricsConfig& cfg) {
  return ScoreReport{bleu_corpus(hypotheses, references, cfg.bleu),
                     ter(hypotheses, references, cfg.ter),
                     chrf(hypotheses, references, cfg.chrf), cfg};
}

Json ScoreReport::to_json() const {
  Json j;
  j["bleu"] = bleu.value;
  j["ter"] = ter.value;
  j["chrf3"] = chrf.value;
  Json components;
  components["bleu"] = components_to_json(bleu);
  components["ter"] = components_to_json(ter);
  components["chrf"] = components_to_json(chrf);
  j["components"] = components;
  Json c;
  c["bleu"] = Json{{"max_order", config.bleu.max_order},
                   {"case_insensitive", config.bleu.case_insensitive},
                   {"tokenizer", to_string(config.bleu.tokenizer)}};
  c["ter"] = Json{{"case_insensitive", config.ter.case_insensitive},
                  {"tokenizer", to_string(config.ter.tokenizer)},
                  {"max_shift_size", kMaxShiftSize},
                  {"max_shift_distance", kMaxShiftDistance}};
  c["chrf"] = Json{{"max_char_order", config.chrf.max_char_order},
                   {"beta", config.chrf.beta},
                   {"remove_whitespace", config.chrf.remove_whitespace}};
  j["config"] = c;
  return j;
}

}  // namespace crisis::metrics
