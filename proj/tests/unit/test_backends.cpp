#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <set>

#include "crisis/backends/config.hpp"
#include "crisis/backends/rate_limiter.hpp"
#include "crisis/backends/translate.hpp"
#include "crisis/common/error.hpp"
#include "generators.hpp"
#include "stub_server.hpp"

using namespace crisis;
using namespace crisis::backends;
namespace ct = crisis::testing;
using namespace std::chrono_literals;

namespace {

const corpus::LanguagePair kEnGa{"en", "ga"};

corpus::Segment seg(std::string id, std::string source) {
  auto s = ct::synthetic_segment(kEnGa, 0);
  s.id = std::move(id);
  s.source_text = std::move(source);
  return s;
}

BackendConfig remote_config(const std::string& url) {
  BackendConfig cfg;
  cfg.kind = BackendKind::remote_chat;
  cfg.endpoint_url = url;
  cfg.auth_token_env_var = "CRISIS_TEST_TOKEN";
  cfg.model_name = "stub-model";
  cfg.rate_limit = 1000;
  ::setenv("CRISIS_TEST_TOKEN", "s3cret", 1);
  return cfg;
}

BatchOptions fast_retries() {
  BatchOptions o;
  o.retry_base_delay = 5ms;
  return o;
}

}  // namespace

TEST(BackendConfig, DefaultMockEchoIsValid) { EXPECT_TRUE(validate_config(BackendConfig{}).empty()); }

TEST(BackendConfig, MissingTextPlaceholderNamesPromptTemplate) {
  BackendConfig cfg;
  cfg.prompt_template = "Translate from {src_lang} to {tgt_lang}.";
  const auto issues = validate_config(cfg);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].field, "prompt_template");
}

TEST(BackendConfig, TemperatureOutOfRange) {
  BackendConfig cfg;
  cfg.temperature = 3.0;
  const auto issues = validate_config(cfg);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].field, "temperature");
  cfg.temperature = 2.0;
  EXPECT_TRUE(validate_config(cfg).empty());
  cfg.temperature = -0.1;
  EXPECT_EQ(validate_config(cfg).size(), 1u);
}

TEST(BackendConfig, DefaultTemperatureIsHalf) { EXPECT_DOUBLE_EQ(BackendConfig{}.temperature, 0.5); }

TEST(BackendConfig, RemoteRequiresEndpointAndTokenVar) {
  BackendConfig cfg;
  cfg.kind = BackendKind::remote_chat;
  auto issues = validate_config(cfg);
  std::set<std::string> fields;
  for (const auto& i : issues) fields.insert(i.field);
  EXPECT_EQ(fields, (std::set<std::string>{"endpoint_url", "auth_token_env_var"}));
  cfg.endpoint_url = "ftp://example.org";
  cfg.auth_token_env_var = "X";
  issues = validate_config(cfg);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].field, "endpoint_url");
}

TEST(BackendConfig, JsonRoundTripAndFingerprint) {
  BackendConfig cfg;
  cfg.kind = BackendKind::mock_dictionary;
  cfg.dictionary = {{"cat", "cat_T"}};
  cfg.glossary = "lockdown = dianghlasáil";
  const auto back = BackendConfig::from_json(cfg.to_json());
  EXPECT_EQ(back.to_json(), cfg.to_json());
  EXPECT_EQ(back.fingerprint(), cfg.fingerprint());
  cfg.temperature = 0.7;
  EXPECT_NE(back.fingerprint(), cfg.fingerprint());
}

TEST(BackendConfig, MalformedJsonIsParseError) {
  EXPECT_THROW(BackendConfig::from_json(nlohmann::ordered_json{{"temperature", "hot"}}), ParseError);
  EXPECT_THROW(BackendConfig::from_json(nlohmann::ordered_json::array()), ParseError);
}

TEST(BackendConfig, RenderPrompt) {
  BackendConfig cfg;
  EXPECT_EQ(render_prompt(cfg, kEnGa, "Wash your hands"),
            "Translate the following text from English to Irish. Reply with the translation only.\n"
            "Wash your hands");
  cfg.glossary = "hands = lámha";
  EXPECT_EQ(render_prompt(cfg, kEnGa, "x").rfind("Glossary:\nhands = lámha\n\n", 0), 0u);
  EXPECT_NE(render_prompt(cfg, kEnGa, "{src_lang}").find("\n{src_lang}"), std::string::npos);
}

TEST(BackendConfig, ParseUrl) {
  const auto u = parse_url("http://127.0.0.1:8080/v1/chat");
  EXPECT_EQ(u.host, "127.0.0.1");
  EXPECT_EQ(u.port, 8080);
  EXPECT_EQ(u.path, "/v1/chat");
  EXPECT_EQ(parse_url("https://api.example.org").port, 443);
  EXPECT_EQ(parse_url("https://api.example.org").path, "/");
  EXPECT_THROW(parse_url("api.example.org"), BackendError);
  EXPECT_THROW(parse_url("http://host:notaport/"), BackendError);
  EXPECT_THROW(parse_url("http:///path"), BackendError);
}

TEST(MockBackends, EchoReturnsSource) {
  const std::vector<corpus::Segment> batch{seg("s1", "Dia dhuit")};
  const auto out = translate_batch(BackendConfig{}, batch);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].hypothesis, "Dia dhuit");
  EXPECT_FALSE(out[0].error);
  EXPECT_EQ(out[0].backend, "mock-echo");
}

TEST(MockBackends, DictionaryIsTokenWise) {
  BackendConfig cfg;
  cfg.kind = BackendKind::mock_dictionary;
  cfg.dictionary = {{"cat", "cat_T"}};
  EXPECT_EQ(dictionary_translate(cfg.dictionary, "cat cat"), "cat_T cat_T");
  EXPECT_EQ(dictionary_translate(cfg.dictionary, "the cat sat"), "the cat_T sat");
  const std::vector<corpus::Segment> batch{seg("s1", "cat cat")};
  EXPECT_EQ(translate_batch(cfg, batch)[0].hypothesis, "cat_T cat_T");
}

TEST(MockBackends, DeterministicAndOrderPreserving) {
  BackendConfig cfg;
  cfg.kind = BackendKind::mock_dictionary;
  cfg.dictionary = {{"source", "foinse"}, {"number", "uimhir"}};
  std::vector<corpus::Segment> batch;
  for (std::size_t i = 0; i < 40; ++i) batch.push_back(ct::synthetic_segment(kEnGa, i));
  const auto a = translate_batch(cfg, batch);
  const auto b = translate_batch(cfg, batch);
  ASSERT_EQ(a.size(), batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    EXPECT_EQ(a[i].segment_id, batch[i].id);
    EXPECT_EQ(a[i].hypothesis, b[i].hypothesis);
  }
}

TEST(MockBackends, RejectsEmptyAndMixedBatches) {
  EXPECT_THROW(translate_batch(BackendConfig{}, std::vector<corpus::Segment>{}), ValidationError);
  auto other = seg("s2", "x");
  other.pair = kEnGa.reversed();
  const std::vector<corpus::Segment> batch{seg("s1", "x"), other};
  EXPECT_THROW(translate_batch(BackendConfig{}, batch), ValidationError);
}

TEST(RemoteChat, OneRequestPerSegmentWithVerbatimContent) {
  ct::StubChatServer stub([](std::size_t, const nlohmann::json&) {
    return ct::StubChatServer::Reply{200, "  Fan sa bhaile.\n"};
  });
  auto cfg = remote_config(stub.url());
  std::vector<corpus::Segment> batch;
  for (std::size_t i = 0; i < 12; ++i) batch.push_back(ct::synthetic_segment(kEnGa, i));
  const auto out = translate_batch(cfg, batch);
  ASSERT_EQ(out.size(), batch.size());
  EXPECT_EQ(stub.request_count(), batch.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(out[i].segment_id, batch[i].id);
    EXPECT_EQ(out[i].hypothesis, "  Fan sa bhaile.\n");
    EXPECT_EQ(out[i].backend, "stub-model");
  }
  for (const auto& h : stub.auth_headers()) EXPECT_EQ(h, "Bearer s3cret");
}

TEST(RemoteChat, RequestBodyShape) {
  ct::StubChatServer stub([](std::size_t, const nlohmann::json&) {
    return ct::StubChatServer::Reply{200, "ok"};
  });
  auto cfg = remote_config(stub.url());
  cfg.temperature = 0.5;
  const std::vector<corpus::Segment> batch{seg("s1", "Stay home")};
  translate_batch(cfg, batch);
  const auto body = nlohmann::json::parse(stub.bodies().at(0));
  EXPECT_EQ(body["model"], "stub-model");
  EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 0.5);
  ASSERT_EQ(body["messages"].size(), 1u);
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], render_prompt(cfg, kEnGa, "Stay home"));
}

TEST(RemoteChat, ResultsFollowInputOrderUnderConcurrency) {
  ct::StubChatServer stub([](std::size_t index, const nlohmann::json& body) {
    std::this_thread::sleep_for(std::chrono::milliseconds((index * 7) % 13));
    const std::string content = body["messages"][0]["content"];
    return ct::StubChatServer::Reply{200, content.substr(content.rfind('\n') + 1)};
  });
  auto cfg = remote_config(stub.url());
  cfg.concurrency = 6;
  std::vector<corpus::Segment> batch;
  for (std::size_t i = 0; i < 30; ++i) batch.push_back(ct::synthetic_segment(kEnGa, i));
  const auto out = translate_batch(cfg, batch);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    EXPECT_EQ(out[i].segment_id, batch[i].id);
    EXPECT_EQ(out[i].hypothesis, batch[i].source_text);
  }
}

TEST(RemoteChat, RetriesTransientFailures) {
  ct::StubChatServer stub([](std::size_t index, const nlohmann::json&) {
    if (index == 0) return ct::StubChatServer::Reply{503, ""};
    if (index == 1) return ct::StubChatServer::Reply{429, ""};
    return ct::StubChatServer::Reply{200, "done"};
  });
  auto cfg = remote_config(stub.url());
  cfg.max_retries = 3;
  const std::vector<corpus::Segment> batch{seg("s1", "x")};
  const auto out = translate_batch(cfg, batch, fast_retries());
  EXPECT_EQ(out[0].hypothesis, "done");
  EXPECT_EQ(stub.request_count(), 3u);
}

TEST(RemoteChat, ExhaustedRetriesYieldErrorResultNotAbort) {
  ct::StubChatServer stub([](std::size_t, const nlohmann::json& body) {
    const std::string content = body["messages"][0]["content"];
    if (content.ends_with("bad")) return ct::StubChatServer::Reply{500, ""};
    return ct::StubChatServer::Reply{200, "fine"};
  });
  auto cfg = remote_config(stub.url());
  cfg.max_retries = 2;
  cfg.concurrency = 1;
  const std::vector<corpus::Segment> batch{seg("s1", "good"), seg("s2", "bad"), seg("s3", "good")};
  const auto out = translate_batch(cfg, batch, fast_retries());
  EXPECT_EQ(out[0].hypothesis, "fine");
  EXPECT_FALSE(out[1].hypothesis);
  ASSERT_TRUE(out[1].error);
  EXPECT_NE(out[1].error->find("500"), std::string::npos);
  EXPECT_EQ(out[2].hypothesis, "fine");
  EXPECT_EQ(stub.request_count(), 2u + 3u);
}

TEST(RemoteChat, ClientErrorsAreNotRetried) {
  ct::StubChatServer stub([](std::size_t, const nlohmann::json&) {
    return ct::StubChatServer::Reply{400, ""};
  });
  auto cfg = remote_config(stub.url());
  cfg.max_retries = 4;
  const std::vector<corpus::Segment> batch{seg("s1", "x")};
  const auto out = translate_batch(cfg, batch, fast_retries());
  EXPECT_TRUE(out[0].error);
  EXPECT_EQ(stub.request_count(), 1u);
}

TEST(RemoteChat, UnreachableEndpointIsPerSegmentError) {
  auto cfg = remote_config("http://127.0.0.1:1/v1");
  cfg.max_retries = 1;
  cfg.request_timeout = 500ms;
  const std::vector<corpus::Segment> batch{seg("s1", "x")};
  const auto out = translate_batch(cfg, batch, fast_retries());
  EXPECT_FALSE(out[0].ok());
  EXPECT_TRUE(out[0].error);
}

TEST(RemoteChat, MissingTokenVariableIsBackendError) {
  auto cfg = remote_config("http://127.0.0.1:1/v1");
  cfg.auth_token_env_var = "CRISIS_TEST_TOKEN_UNSET";
  ::unsetenv("CRISIS_TEST_TOKEN_UNSET");
  const std::vector<corpus::Segment> batch{seg("s1", "x")};
  EXPECT_THROW(translate_batch(cfg, batch), BackendError);
}

TEST(RemoteChat, MalformedUrlIsBackendError) {
  auto cfg = remote_config("not a url");
  const std::vector<corpus::Segment> batch{seg("s1", "x")};
  EXPECT_THROW(translate_batch(cfg, batch), BackendError);
}

TEST(RemoteChat, RateLimitHoldsInEveryWindow) {
  ct::StubChatServer stub([](std::size_t, const nlohmann::json&) {
    return ct::StubChatServer::Reply{200, "ok"};
  });
  auto cfg = remote_config(stub.url());
  cfg.rate_limit = 4;
  cfg.concurrency = 4;
  BatchOptions opts;
  opts.rate_window = 300ms;
  std::vector<corpus::Segment> batch;
  for (std::size_t i = 0; i < 14; ++i) batch.push_back(ct::synthetic_segment(kEnGa, i));
  translate_batch(cfg, batch, opts);
  auto arrivals = stub.arrivals();
  ASSERT_EQ(arrivals.size(), batch.size());
  std::sort(arrivals.begin(), arrivals.end());
  for (std::size_t i = 0; i + 4 < arrivals.size(); ++i) {
    EXPECT_GE(arrivals[i + 4] - arrivals[i], opts.rate_window) << "window starting at request " << i;
  }
}

TEST(RateLimiter, AdmitsUpToLimitImmediately) {
  RateLimiter limiter(3, 10s);
  const auto start = RateLimiter::Clock::now();
  { auto a = limiter.acquire(); auto b = limiter.acquire(); auto c = limiter.acquire(); }
  EXPECT_LT(RateLimiter::Clock::now() - start, 1s);
}

TEST(RateLimiter, BlocksUntilWindowPasses) {
  RateLimiter limiter(2, 150ms);
  { auto a = limiter.acquire(); }
  { auto b = limiter.acquire(); }
  const auto before = RateLimiter::Clock::now();
  { auto c = limiter.acquire(); }
  EXPECT_GE(RateLimiter::Clock::now() - before, 100ms);
}

TEST(RateLimiter, ZeroLimitRejected) { EXPECT_THROW(RateLimiter(0, 1s), ValidationError); }
