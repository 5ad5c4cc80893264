#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace crisis::metrics {

enum class TokenizerMode {
  /// Split on Unicode whitespace only.
  whitespace,
  /// Whitespace split, then every punctuation or symbol code point becomes
  /// its own token: "COVID-19," -> COVID - 19 ,
  international,
};

std::string_view to_string(TokenizerMode mode);

std::vector<std::string> tokenize(std::string_view text, TokenizerMode mode);

}  // namespace crisis::metrics
