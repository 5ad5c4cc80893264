#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "crisis/corpus/types.hpp"

namespace crisis::testing {

inline const std::vector<std::string>& small_vocab() {
  static const std::vector<std::string> v{"a", "b", "c", "d", "e"};
  return v;
}

inline const std::vector<std::string>& crisis_vocab() {
  static const std::vector<std::string> v{
      "the", "virus", "vaccine", "hospital", "mask", "wash", "hands", "stay", "home", "safe",
      "covid-19", "test", "positive", "negative", "symptoms", "fever", "cough", "doctor",
      "isolate", "days", "public", "health", "advice", "school", "closed", "Dia", "dhuit",
      "lámha", "nigh", "fanaigí", "sa", "bhaile", "!", ",", ".", "?"};
  return v;
}

inline std::string random_sentence(std::mt19937_64& rng, const std::vector<std::string>& vocab,
                                   std::size_t min_len, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len_dist(min_len, max_len);
  std::uniform_int_distribution<std::size_t> word(0, vocab.size() - 1);
  const std::size_t len = len_dist(rng);
  std::string out;
  for (std::size_t i = 0; i < len; ++i) {
    if (i) out.push_back(' ');
    out += vocab[word(rng)];
  }
  return out;
}

inline std::string upper_ascii(std::string s) {
  for (char& c : s)
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  return s;
}

/// Segment with unique, collision-free text derived from `index`.
inline corpus::Segment synthetic_segment(const corpus::LanguagePair& pair, std::size_t index,
                                         const std::string& id_prefix = "seg") {
  corpus::Segment s;
  s.id = id_prefix + "-" + std::to_string(index);
  s.pair = pair;
  s.source_text = "source sentence number " + std::to_string(index);
  s.target_text = "abairt sprice uimhir " + std::to_string(index);
  s.contributor = "contributor-" + std::to_string(index % 7);
  s.stream = corpus::kAllStreams[index % 3];
  s.status = corpus::ReviewStatus::accepted;
  s.created_at = Timestamp{std::chrono::milliseconds{1'700'000'000'000LL + static_cast<long long>(index) * 1000}};
  return s;
}

}  // namespace crisis::testing
