#pragma once

#include <span>
#include <string>

#include <json.hpp>

#include "crisis/metrics/bleu.hpp"
#include "crisis/metrics/chrf.hpp"
#include "crisis/metrics/score.hpp"
#include "crisis/metrics/ter.hpp"

namespace crisis::metrics {

struct MetricsConfig {
  BleuConfig bleu;
  TerConfig ter;
  ChrfConfig chrf;
};

struct ScoreReport {
  MetricScore bleu;
  MetricScore ter;
  MetricScore chrf;
  MetricsConfig config;

  /// {"bleu","ter","chrf3","components":{...},"config":{...}} in fixed key order.
  nlohmann::ordered_json to_json() const;
};

ScoreReport score_all(std::span<const std::string> hypotheses,
                      std::span<const std::string> references, const MetricsConfig& cfg = {});

nlohmann::ordered_json components_to_json(const MetricScore& score);

}  // namespace crisis::metrics
