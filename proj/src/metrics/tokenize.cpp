#include "crisis/metrics/tokenize.hpp"

#include "crisis/common/text.hpp"

namespace crisis::metrics {

std::string_view to_string(TokenizerMode mode) {
  return mode == TokenizerMode::whitespace ? "whitespace" : "international";
}

std::vector<std::string> tokenize(std::string_view text, TokenizerMode mode) {
  std::vector<std::string> tokens;
  std::u32string current;
  const auto flush = [&] {
    if (!current.empty()) {
      tokens.push_back(text::to_utf8(current));
      current.clear();
    }
  };
  for (char32_t cp : text::to_code_points(text)) {
    if (text::is_whitespace(cp)) {
      flush();
    } else if (mode == TokenizerMode::international && text::is_punctuation_or_symbol(cp)) {
      flush();
      tokens.push_back(text::to_utf8(std::u32string_view(&cp, 1)));
    } else {
      current.push_back(cp);
    }
  }
  flush();
  return tokens;
}

}  // namespace crisis::metrics
