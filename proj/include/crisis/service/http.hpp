#pragma once

#include <memory>
#include <string>
#include <thread>

#include "crisis/service/service.hpp"

namespace httplib {
class Server;
}

namespace crisis::service {

/// REST front end for a CorpusService. Routes:
///   GET  /api/health
///   GET  /api/pairs
///   POST /api/pairs/{src}-{tgt}/segments        contributor+
///   GET  /api/pairs/{src}-{tgt}/segments?status= reviewer+
///   POST /api/pairs/{src}-{tgt}/phase           coordinator
///   GET  /api/pairs/{src}-{tgt}/stats
///   POST /api/pairs/{src}-{tgt}/exports         coordinator
///   GET  /api/exports/{receipt}                 reviewer+
///   GET  /api/exports/{receipt}/files/{name}    reviewer+
///   POST /api/segments/{id}/review              reviewer+
///   GET  /api/segments/{id}                     reviewer+
///   GET  /api/leaderboards/{direction}?reference=&format=
/// Errors are JSON {"error": code, "message": text}.
class HttpServer {
 public:
  explicit HttpServer(CorpusService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds without serving. Port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  void serve();
  /// Serves on a background thread; returns once ready.
  void start();
  void stop();
  int port() const noexcept { return port_; }

 private:
  void register_routes();

  CorpusService& service_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = -1;
};

}  // namespace crisis::service
