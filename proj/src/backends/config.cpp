#include "crisis/backends/config.hpp"

#include <charconv>

#include "crisis/common/error.hpp"
#include "crisis/common/hash.hpp"

namespace crisis::backends {

using Json = nlohmann::ordered_json;

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::mock_echo: return "mock_echo";
    case BackendKind::mock_dictionary: return "mock_dictionary";
    case BackendKind::remote_chat: return "remote_chat";
  }
  return "mock_echo";
}

BackendKind parse_backend_kind(std::string_view s) {
  for (BackendKind k : {BackendKind::mock_echo, BackendKind::mock_dictionary, BackendKind::remote_chat}) {
    if (to_string(k) == s) return k;
  }
  throw ValidationError("unknown backend kind '" + std::string(s) + "'");
}

Json BackendConfig::to_json() const {
  Json j;
  j["kind"] = to_string(kind);
  j["endpoint_url"] = endpoint_url;
  j["auth_token_env_var"] = auth_token_env_var;
  j["model_name"] = model_name;
  j["temperature"] = temperature;
  j["prompt_template"] = prompt_template;
  j["glossary"] = glossary;
  Json dict = Json::object();
  for (const auto& [k, v] : dictionary) dict[k] = v;
  j["dictionary"] = dict;
  j["max_retries"] = max_retries;
  j["request_timeout_ms"] = request_timeout.count();
  j["rate_limit"] = rate_limit;
  j["concurrency"] = concurrency;
  return j;
}

BackendConfig BackendConfig::from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("backend config must be a JSON object");
  BackendConfig cfg;
  try {
    if (auto it = j.find("kind"); it != j.end()) cfg.kind = parse_backend_kind(it->get<std::string>());
    if (cfg.kind == BackendKind::mock_dictionary) cfg.model_name = "mock-dictionary";
    if (auto it = j.find("endpoint_url"); it != j.end()) cfg.endpoint_url = it->get<std::string>();
    if (auto it = j.find("auth_token_env_var"); it != j.end()) cfg.auth_token_env_var = it->get<std::string>();
    if (auto it = j.find("model_name"); it != j.end()) cfg.model_name = it->get<std::string>();
    if (auto it = j.find("temperature"); it != j.end()) cfg.temperature = it->get<double>();
    if (auto it = j.find("prompt_template"); it != j.end()) cfg.prompt_template = it->get<std::string>();
    if (auto it = j.find("glossary"); it != j.end()) cfg.glossary = it->get<std::string>();
    if (auto it = j.find("dictionary"); it != j.end()) {
      for (const auto& [k, v] : it->items()) cfg.dictionary[k] = v.get<std::string>();
    }
    if (auto it = j.find("max_retries"); it != j.end()) cfg.max_retries = it->get<int>();
    if (auto it = j.find("request_timeout_ms"); it != j.end()) {
      cfg.request_timeout = std::chrono::milliseconds{it->get<long long>()};
    }
    if (auto it = j.find("rate_limit"); it != j.end()) cfg.rate_limit = it->get<int>();
    if (auto it = j.find("concurrency"); it != j.end()) cfg.concurrency = it->get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed backend config: ") + e.what());
  }
  return cfg;
}

std::string BackendConfig::fingerprint() const { return hash::sha256_hex(to_json().dump()); }

std::vector<ConfigIssue> validate_config(const BackendConfig& cfg) {
  std::vector<ConfigIssue> issues;
  if (!(cfg.temperature >= 0.0 && cfg.temperature <= 2.0)) {
    issues.push_back({"temperature", "must lie in [0, 2]"});
  }
  for (const char* placeholder : {"{src_lang}", "{tgt_lang}", "{text}"}) {
    if (cfg.prompt_template.find(placeholder) == std::string::npos) {
      issues.push_back({"prompt_template", std::string("missing placeholder ") + placeholder});
    }
  }
  if (cfg.model_name.empty()) issues.push_back({"model_name", "must not be empty"});
  if (cfg.max_retries < 0) issues.push_back({"max_retries", "must not be negative"});
  if (cfg.request_timeout.count() <= 0) issues.push_back({"request_timeout", "must be positive"});
  if (cfg.rate_limit <= 0) issues.push_back({"rate_limit", "must be positive"});
  if (cfg.concurrency <= 0) issues.push_back({"concurrency", "must be positive"});
  if (cfg.kind == BackendKind::remote_chat) {
    if (cfg.endpoint_url.empty()) {
      issues.push_back({"endpoint_url", "required for remote_chat"});
    } else {
      try {
        parse_url(cfg.endpoint_url);
      } catch (const BackendError& e) {
        issues.push_back({"endpoint_url", e.what()});
      }
    }
    if (cfg.auth_token_env_var.empty()) {
      issues.push_back({"auth_token_env_var", "required for remote_chat"});
    }
  }
  return issues;
}

std::string language_name(std::string_view tag) {
  static const std::map<std::string_view, std::string_view> kNames{
      {"en", "English"}, {"ga", "Irish"}, {"mr", "Marathi"}, {"hi", "Hindi"},
      {"fr", "French"},  {"de", "German"}, {"es", "Spanish"}, {"ht", "Haitian Creole"}};
  if (auto it = kNames.find(tag); it != kNames.end()) return std::string(it->second);
  return std::string(tag);
}

namespace {

void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

}  // namespace

std::string render_prompt(const BackendConfig& cfg, const corpus::LanguagePair& pair,
                          std::string_view text) {
  std::string prompt = cfg.prompt_template;
  // {text} last so placeholders inside the segment text stay literal.
  replace_all(prompt, "{src_lang}", language_name(pair.source()));
  replace_all(prompt, "{tgt_lang}", language_name(pair.target()));
  replace_all(prompt, "{text}", text);
  if (!cfg.glossary.empty()) prompt = "Glossary:\n" + cfg.glossary + "\n\n" + prompt;
  return prompt;
}

std::string ParsedUrl::origin() const {
  return scheme + "://" + host + ":" + std::to_string(port);
}

ParsedUrl parse_url(std::string_view url) {
  ParsedUrl out;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw BackendError("malformed endpoint URL '" + std::string(url) + "'");
  out.scheme = std::string(url.substr(0, scheme_end));
  if (out.scheme != "http" && out.scheme != "https") {
    throw BackendError("endpoint URL must use http or https: '" + std::string(url) + "'");
  }
  std::string_view rest = url.substr(scheme_end + 3);
  const auto slash = rest.find('/');
  std::string_view authority = rest.substr(0, slash);
  out.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  out.port = out.scheme == "https" ? 443 : 80;
  if (const auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    const std::string_view port = authority.substr(colon + 1);
    int value = 0;
    auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc{} || ptr != port.data() + port.size() || value <= 0 || value > 65535) {
      throw BackendError("malformed port in endpoint URL '" + std::string(url) + "'");
    }
    out.port = value;
    authority = authority.substr(0, colon);
  }
  if (authority.empty() || authority.find_first_of(" \t@") != std::string_view::npos) {
    throw BackendError("malformed host in endpoint URL '" + std::string(url) + "'");
  }
  out.host = std::string(authority);
  return out;
}

}  // namespace crisis::backends
