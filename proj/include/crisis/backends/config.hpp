#pragma once

#include <chrono>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "crisis/corpus/types.hpp"

namespace crisis::backends {

enum class BackendKind { mock_echo, mock_dictionary, remote_chat };
std::string_view to_string(BackendKind kind);
BackendKind parse_backend_kind(std::string_view s);

inline constexpr std::string_view kDefaultPromptTemplate =
    "Translate the following text from {src_lang} to {tgt_lang}. Reply with the translation "
    "only.\n{text}";

/// A translation backend. Secrets are never stored here: `auth_token_env_var`
/// names the environment variable holding the bearer token.
struct BackendConfig {
  BackendKind kind = BackendKind::mock_echo;
  std::string endpoint_url;
  std::string auth_token_env_var;
  std::string model_name = "mock-echo";
  double temperature = 0.5;
  std::string prompt_template{kDefaultPromptTemplate};
  /// Optional terminology block placed before the rendered prompt.
  std::string glossary;
  /// Token-wise lookup table for mock_dictionary.
  std::map<std::string, std::string> dictionary;
  int max_retries = 3;
  std::chrono::milliseconds request_timeout{30'000};
  /// Requests per minute.
  int rate_limit = 60;
  /// Maximum in-flight requests for one batch.
  int concurrency = 4;

  nlohmann::ordered_json to_json() const;
  /// Unknown keys are ignored; wrong types raise ParseError.
  static BackendConfig from_json(const nlohmann::ordered_json& j);
  /// SHA-256 of the canonical JSON form.
  std::string fingerprint() const;
};

struct ConfigIssue {
  std::string field;
  std::string message;

  friend bool operator==(const ConfigIssue&, const ConfigIssue&) = default;
};

/// Empty iff the config satisfies every invariant.
std::vector<ConfigIssue> validate_config(const BackendConfig& cfg);

/// Human-readable language name for known tags, the tag itself otherwise.
std::string language_name(std::string_view tag);

/// Fills {src_lang}, {tgt_lang} and {text}; prepends the glossary if set.
std::string render_prompt(const BackendConfig& cfg, const corpus::LanguagePair& pair,
                          std::string_view text);

struct ParsedUrl {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path;

  std::string origin() const;
};

/// Accepts http(s)://host[:port][/path]. Throws BackendError otherwise.
ParsedUrl parse_url(std::string_view url);

}  // namespace crisis::backends
