#include "crisis/service/http.hpp"

#include <httplib.h>

#include <algorithm>

#include "crisis/common/error.hpp"

namespace crisis::service {

using Json = nlohmann::ordered_json;

namespace {

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  send_json(res, status, Json{{"error", code}, {"message", message}});
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const ApiError& e) {
    send_json(res, e.status(), e.to_json());
  } catch (const nlohmann::json::exception& e) {
    send_error(res, 400, "bad_request", std::string("malformed JSON body: ") + e.what());
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::validation:
      case ErrorKind::encoding:
      case ErrorKind::parse: send_error(res, 422, "unprocessable", e.what()); break;
      case ErrorKind::backend: send_error(res, 502, "backend", e.what()); break;
      case ErrorKind::io: send_error(res, 500, "io", e.what()); break;
    }
  } catch (const std::exception& e) {
    send_error(res, 500, "internal", e.what());
  }
}

std::string bearer_token(const httplib::Request& req) {
  const auto header = req.get_header_value("Authorization");
  constexpr std::string_view prefix = "Bearer ";
  if (header.size() <= prefix.size() || header.compare(0, prefix.size(), prefix) != 0) return {};
  return header.substr(prefix.size());
}

Json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  Json j = Json::parse(req.body);
  if (!j.is_object()) throw ApiError(400, "bad_request", "request body must be a JSON object");
  return j;
}

std::string string_field(const Json& body, std::initializer_list<const char*> names, bool required) {
  for (const char* name : names) {
    auto it = body.find(name);
    if (it == body.end() || it->is_null()) continue;
    if (!it->is_string()) throw ApiError(422, "unprocessable", std::string(name) + " must be a string");
    return it->get<std::string>();
  }
  if (required) throw ApiError(422, "unprocessable", std::string("missing field ") + *names.begin());
  return {};
}

Json phase_json(corpus::CrisisPhase p) {
  return Json{{"ordinal", p.ordinal()}, {"label", corpus::to_string(p.label())}};
}

}  // namespace

HttpServer::HttpServer(CorpusService& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
  register_routes();
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::register_routes() {
  auto& srv = *server_;
  auto& svc = service_;
  const auto origins = svc.config().cors_origins;

  srv.set_post_routing_handler([origins](const httplib::Request& req, httplib::Response& res) {
    const auto origin = req.get_header_value("Origin");
    if (!origin.empty() && std::find(origins.begin(), origins.end(), origin) != origins.end()) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Vary", "Origin");
    }
  });
  srv.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Authorization, Content-Type");
    res.set_header("Access-Control-Max-Age", "600");
  });
  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      send_error(res, res.status, res.status == 404 ? "not_found" : "error", "no such resource");
    }
  });

  srv.Get("/api/health", [&svc](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      send_json(res, 200, Json{{"status", "ok"}, {"last_seq", svc.snapshot().last_seq()}});
    });
  });

  srv.Get("/api/pairs", [&svc](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      Json pairs = Json::array();
      for (const auto& ps : svc.pairs()) {
        pairs.push_back(Json{{"pair", ps.pair.code()}, {"phase", phase_json(ps.phase)},
                             {"segments", ps.segment_ids.size()}});
      }
      send_json(res, 200, Json{{"pairs", pairs}});
    });
  });

  srv.Post(R"(/api/pairs/([^/]+)/segments)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto who = svc.authenticate(bearer_token(req));
      const Json body = parse_body(req);
      SubmitRequest sub;
      sub.source_text = string_field(body, {"source_text", "source"}, true);
      sub.target_text = string_field(body, {"target_text", "target"}, true);
      if (auto stream = string_field(body, {"stream"}, false); !stream.empty()) sub.stream = corpus::parse_stream(stream);
      const auto id = svc.submit_segment(who, req.matches[1].str(), sub);
      send_json(res, 201, segment_entry_to_json(svc.get_segment(id)));
    });
  });

  srv.Get(R"(/api/pairs/([^/]+)/segments)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto who = svc.authenticate(bearer_token(req));
      if (who.role == Role::contributor) throw ApiError(403, "forbidden", "listing segments requires the reviewer role");
      std::optional<corpus::ReviewStatus> status;
      if (req.has_param("status")) status = corpus::parse_status(req.get_param_value("status"));
      Json segs = Json::array();
      for (const auto& seg : svc.list_segments(req.matches[1].str(), status)) {
        segs.push_back(segment_entry_to_json(svc.get_segment(seg.id)));
      }
      send_json(res, 200, Json{{"pair", req.matches[1].str()}, {"segments", segs}});
    });
  });

  srv.Post(R"(/api/pairs/([^/]+)/phase)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto who = svc.authenticate(bearer_token(req));
      const auto phase = svc.advance_phase(who, req.matches[1].str());
      send_json(res, 200, Json{{"pair", req.matches[1].str()}, {"phase", phase_json(phase)}});
    });
  });

  srv.Get(R"(/api/pairs/([^/]+)/stats)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, svc.stats(req.matches[1].str()).to_json()); });
  });

  srv.Post(R"(/api/pairs/([^/]+)/exports)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto who = svc.authenticate(bearer_token(req));
      const auto options = ExportOptions::from_json(parse_body(req));
      const auto entry = svc.create_export(who, req.matches[1].str(), options);
      res.set_header("Location", "/api/exports/" + entry.receipt_id);
      send_json(res, 201, export_entry_to_json(entry));
    });
  });

  auto require_reader = [&svc](const httplib::Request& req) {
    const auto who = svc.authenticate(bearer_token(req));
    if (who.role == Role::contributor) throw ApiError(403, "forbidden", "this resource requires the reviewer role");
  };

  srv.Get(R"(/api/exports/([^/]+))", [&svc, require_reader](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      require_reader(req);
      send_json(res, 200, export_entry_to_json(svc.get_export(req.matches[1].str())));
    });
  });

  srv.Get(R"(/api/exports/([^/]+)/files/([^/]+))",
          [&svc, require_reader](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
              require_reader(req);
              const auto name = req.matches[2].str();
              const auto content = svc.export_file(req.matches[1].str(), name);
              const bool json = name.ends_with(".json");
              res.status = 200;
              res.set_content(content, json ? "application/json" : "text/plain; charset=utf-8");
            });
          });

  srv.Post(R"(/api/segments/([^/]+)/review)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto who = svc.authenticate(bearer_token(req));
      const Json body = parse_body(req);
      const auto verdict = string_field(body, {"verdict"}, true);
      auto entry = svc.review_segment(who, req.matches[1].str(), verdict, string_field(body, {"note"}, false));
      send_json(res, 200, segment_entry_to_json(entry));
    });
  });

  srv.Get(R"(/api/segments/([^/]+))", [&svc, require_reader](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      require_reader(req);
      send_json(res, 200, segment_entry_to_json(svc.get_segment(req.matches[1].str())));
    });
  });

  srv.Get(R"(/api/leaderboards/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::optional<std::string> reference;
      if (req.has_param("reference")) reference = req.get_param_value("reference");
      const auto lb = svc.leaderboard(req.matches[1].str(), reference);
      const auto format = req.has_param("format") ? eval::parse_report_format(req.get_param_value("format"))
                                                  : eval::ReportFormat::json;
      if (format == eval::ReportFormat::markdown) {
        res.status = 200;
        res.set_content(eval::render_report(lb, format), "text/markdown; charset=utf-8");
      } else {
        send_json(res, 200, eval::leaderboard_to_json(lb));
      }
    });
  });
}

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  return port_;
}

void HttpServer::serve() {
  if (port_ < 0) throw IoError("server is not bound");
  server_->listen_after_bind();
}

void HttpServer::start() {
  if (port_ < 0) throw IoError("server is not bound");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void HttpServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace crisis::service
