#pragma once

#include <string>
#include <string_view>

namespace crisis::text {

bool is_valid_utf8(std::string_view bytes);

/// NFC-normalizes `raw`, collapses every run of Unicode whitespace to a single
/// ASCII space and strips both ends. Casing is untouched.
/// Throws EncodingError when `raw` is not well-formed UTF-8.
std::string normalize_text(std::string_view raw);

/// Full Unicode case folding (e.g. "Straße" -> "strasse"). Input must be valid UTF-8.
std::string case_fold(std::string_view utf8);

/// Decodes UTF-8 into code points. Input must be valid UTF-8.
std::u32string to_code_points(std::string_view utf8);

std::string to_utf8(std::u32string_view code_points);

bool is_whitespace(char32_t cp);

/// True for code points in the Unicode P* (punctuation) and S* (symbol) categories.
bool is_punctuation_or_symbol(char32_t cp);

}  // namespace crisis::text
