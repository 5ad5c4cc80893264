#include "crisis/backends/translate.hpp"

#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

#include "crisis/backends/rate_limiter.hpp"
#include "crisis/common/error.hpp"

namespace crisis::backends {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::string dictionary_translate(const std::map<std::string, std::string>& table,
                                 std::string_view text) {
  if (auto it = table.find(std::string(text)); it != table.end()) return it->second;
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    const auto start = text.find_first_not_of(" \t\n\r", i);
    if (start == std::string_view::npos) break;
    auto end = text.find_first_of(" \t\n\r", start);
    if (end == std::string_view::npos) end = text.size();
    const std::string token(text.substr(start, end - start));
    if (!out.empty()) out += ' ';
    if (auto it = table.find(token); it != table.end()) {
      out += it->second;
    } else {
      out += token;
    }
    i = end;
  }
  return out;
}

namespace {

struct Attempt {
  std::optional<std::string> content;
  std::string error;
  bool transient = false;
};

Attempt post_once(httplib::Client& client, const std::string& path, const httplib::Headers& headers,
                  const std::string& body) {
  auto res = client.Post(path, headers, body, "application/json");
  if (!res) return {std::nullopt, "request failed: " + httplib::to_string(res.error()), true};
  if (res->status == 429 || res->status >= 500) {
    return {std::nullopt, "HTTP " + std::to_string(res->status), true};
  }
  if (res->status < 200 || res->status >= 300) {
    return {std::nullopt, "HTTP " + std::to_string(res->status), false};
  }
  try {
    const Json j = Json::parse(res->body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) return {std::nullopt, "assistant content is not a string", false};
    return {content.get<std::string>(), {}, false};
  } catch (const nlohmann::json::exception& e) {
    return {std::nullopt, std::string("malformed response: ") + e.what(), false};
  }
}

class RemoteChat {
 public:
  RemoteChat(const BackendConfig& cfg, const BatchOptions& options)
      : cfg_(cfg),
        options_(options),
        url_(parse_url(cfg.endpoint_url)),
        limiter_(static_cast<std::size_t>(cfg.rate_limit), options.rate_window) {
    if (cfg.auth_token_env_var.empty()) throw BackendError("remote backend requires auth_token_env_var");
    const char* token = std::getenv(cfg.auth_token_env_var.c_str());
    if (token == nullptr || *token == '\0') {
      throw BackendError("environment variable " + cfg.auth_token_env_var + " is not set");
    }
    headers_ = {{"Authorization", std::string("Bearer ") + token}};
  }

  std::unique_ptr<httplib::Client> make_client() const {
    auto client = std::make_unique<httplib::Client>(url_.origin());
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(cfg_.request_timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(cfg_.request_timeout - secs);
    client->set_connection_timeout(secs.count(), usecs.count());
    client->set_read_timeout(secs.count(), usecs.count());
    client->set_write_timeout(secs.count(), usecs.count());
    return client;
  }

  TranslationResult translate(httplib::Client& client, const corpus::Segment& seg) {
    TranslationResult result{seg.id, std::nullopt, std::nullopt, {}, cfg_.model_name};
    const auto started = Clock::now();
    Json body;
    body["model"] = cfg_.model_name;
    body["temperature"] = cfg_.temperature;
    body["messages"] = Json::array({Json{{"role", "user"},
                                         {"content", render_prompt(cfg_, seg.pair, seg.source_text)}}});
    const std::string payload = body.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(options_.retry_base_delay * (1LL << (attempt - 1)));
      Attempt a;
      {
        auto permit = limiter_.acquire();
        a = post_once(client, url_.path, headers_, payload);
      }
      if (a.content) {
        result.hypothesis = std::move(a.content);
        break;
      }
      last_error = std::move(a.error);
      if (!a.transient) break;
    }
    if (!result.hypothesis) result.error = last_error;
    result.latency = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
    return result;
  }

 private:
  const BackendConfig& cfg_;
  const BatchOptions& options_;
  ParsedUrl url_;
  RateLimiter limiter_;
  httplib::Headers headers_;
};

TranslationResult translate_mock(const BackendConfig& cfg, const corpus::Segment& seg) {
  const auto started = Clock::now();
  TranslationResult r{seg.id, std::nullopt, std::nullopt, {}, cfg.model_name};
  r.hypothesis = cfg.kind == BackendKind::mock_echo ? seg.source_text
                                                    : dictionary_translate(cfg.dictionary, seg.source_text);
  r.latency = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
  return r;
}

}  // namespace

std::vector<TranslationResult> translate_batch(const BackendConfig& cfg,
                                               std::span<const corpus::Segment> segments,
                                               const BatchOptions& options) {
  if (segments.empty()) throw ValidationError("translate_batch requires at least one segment");
  const auto& pair = segments.front().pair;
  for (const auto& seg : segments) {
    if (seg.pair != pair) {
      throw ValidationError("segment " + seg.id + " has pair " + seg.pair.code() + ", expected " + pair.code());
    }
  }
  if (auto issues = validate_config(cfg); !issues.empty()) {
    const auto& first = issues.front();
    const std::string msg = "invalid backend config: " + first.field + ": " + first.message;
    if (cfg.kind == BackendKind::remote_chat && first.field == "endpoint_url") throw BackendError(msg);
    throw ValidationError(msg);
  }

  std::vector<TranslationResult> results(segments.size());
  if (cfg.kind != BackendKind::remote_chat) {
    for (std::size_t i = 0; i < segments.size(); ++i) results[i] = translate_mock(cfg, segments[i]);
    return results;
  }

  RemoteChat remote(cfg, options);
  std::atomic<std::size_t> next{0};
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.concurrency), segments.size());
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      auto client = remote.make_client();
      for (std::size_t i = next++; i < segments.size(); i = next++) {
        results[i] = remote.translate(*client, segments[i]);
      }
    });
  }
  pool.clear();
  return results;
}

}  // namespace crisis::backends
