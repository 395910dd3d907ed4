#include "credfield/http/service.hpp"

#include <httplib.h>

#include "credfield/core/error.hpp"
#include "credfield/wire/json.hpp"

namespace credfield::http {

namespace {

constexpr const char* kJson = "application/json";

void reply(httplib::Response& res, const server::Decision& d) {
  res.status = server::http_status(d.code);
  res.set_content(server::decision_to_json(d).dump(), kJson);
}

/// Origin from ?origin=, else the configured default. Nullopt if unparseable.
std::optional<core::CanonicalOrigin> request_origin(const httplib::Request& req, const server::AuthServer& server) {
  if (!req.has_param("origin")) return server.default_origin();
  try {
    return core::CanonicalOrigin::parse(req.get_param_value("origin"));
  } catch (const core::CoreError&) {
    return std::nullopt;
  }
}

using Flow = server::Decision (server::AuthServer::*)(const wire::AuthMessage&, const core::CanonicalOrigin&,
                                                      std::uint64_t);

}  // namespace

nlohmann::json event_to_json(const server::PolicyEvent& e) {
  return nlohmann::json{{"kind", server::to_string(e.kind)},
                        {"user_id", e.user_id},
                        {"p_b", base64url_encode(e.p_b.bytes())},
                        {"at", wire::u64_to_decimal(e.at)}};
}

HttpService::HttpService(server::AuthServer& server, ServiceOptions options, agent::Clock clock)
    : server_(server), options_(std::move(options)), clock_(std::move(clock)), http_(std::make_unique<httplib::Server>()) {
  routes();
}

HttpService::~HttpService() { stop(); }

void HttpService::routes() {
  http_->set_payload_max_length(options_.max_body_bytes);

  http_->Get("/challenge", [this](const httplib::Request& req, httplib::Response& res) {
    const auto origin = request_origin(req, server_);
    if (!origin) return reply(res, server::Decision::of(server::Code::BadRequest, "bad origin"));
    try {
      res.set_content(wire::grant_to_json(server_.issue_challenge(*origin, clock_())).dump(), kJson);
    } catch (const core::CoreError&) {
      reply(res, server::Decision::of(server::Code::Internal, "challenge unavailable"));
    }
  });

  auto post = [this](const char* path, Flow flow) {
    http_->Post(path, [this, flow](const httplib::Request& req, httplib::Response& res) {
      const auto origin = request_origin(req, server_);
      if (!origin) return reply(res, server::Decision::of(server::Code::BadRequest, "bad origin"));
      std::optional<wire::AuthMessage> msg;
      try {
        msg = wire::auth_message_from_json_text(req.body);
      } catch (const wire::DecodeError& e) {
        return reply(res, server::Decision::of(server::Code::BadRequest, std::string(wire::to_string(e.code()))));
      }
      reply(res, (server_.*flow)(*msg, *origin, clock_()));
    });
  };
  post("/enrol", &server::AuthServer::enrol);
  post("/login", &server::AuthServer::verify);
  post("/change", &server::AuthServer::change_password);

  http_->Get("/events", [this](const httplib::Request&, httplib::Response& res) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : server_.events()) arr.push_back(event_to_json(e));
    res.set_content(arr.dump(), kJson);
  });

  if (!options_.static_dir.empty()) {
    if (!http_->set_mount_point("/", options_.static_dir.string())) {
      throw std::runtime_error("static directory not found: " + options_.static_dir.string());
    }
  }
}

int HttpService::bind() {
  if (port_ >= 0) return port_;
  if (options_.port == 0) {
    port_ = http_->bind_to_any_port(options_.host);
  } else if (http_->bind_to_port(options_.host, options_.port)) {
    port_ = options_.port;
  }
  if (port_ < 0) {
    throw std::runtime_error("cannot bind " + options_.host + ":" + std::to_string(options_.port));
  }
  return port_;
}

void HttpService::run() {
  bind();
  http_->listen_after_bind();
}

void HttpService::start() {
  bind();
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
}

void HttpService::stop() {
  if (http_) http_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace credfield::http
