#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <thread>

#include <json.hpp>

#include "credfield/agent/link.hpp"
#include "credfield/server/auth_server.hpp"

namespace httplib {
class Server;
}

namespace credfield::http {

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  /// Served at "/" when set (demo pages and scripts).
  std::filesystem::path static_dir;
  std::size_t max_body_bytes = 64 * 1024;
};

/// JSON facade over an AuthServer:
///   GET  /challenge?origin=...        -> grant
///   POST /enrol|/login|/change?origin= -> decision, status from http_status()
///   GET  /events                       -> policy events
/// The origin parameter stands in for the page origin and defaults to the
/// server's configured origin.
class HttpService {
 public:
  HttpService(server::AuthServer& server, ServiceOptions options, agent::Clock clock = agent::system_clock());
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds the socket; returns the bound port. Throws std::runtime_error.
  int bind();
  /// Serves until stop(). Binds first if needed.
  void run();
  /// run() on a background thread.
  void start();
  void stop();

  int port() const { return port_; }

 private:
  void routes();

  server::AuthServer& server_;
  ServiceOptions options_;
  agent::Clock clock_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
  int port_ = -1;
};

nlohmann::json event_to_json(const server::PolicyEvent& e);

}  // namespace credfield::http
