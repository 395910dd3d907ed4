#include "credfield/agent/link.hpp"

#include <chrono>
#include <regex>

#include <httplib.h>

#include "credfield/core/error.hpp"
#include "credfield/wire/json.hpp"

namespace credfield::agent {

Clock system_clock() {
  return [] {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::seconds>(now).count());
  };
}

InProcessLink::InProcessLink(server::AuthServer& server, Clock clock) : server_(server), clock_(std::move(clock)) {}

wire::ChallengeGrant InProcessLink::challenge(const core::CanonicalOrigin& origin) {
  try {
    return server_.issue_challenge(origin, clock_());
  } catch (const core::CoreError& e) {
    throw TransportFailure(std::string("challenge: ") + e.what());
  }
}

server::Decision InProcessLink::send(const wire::AuthMessage& msg, const core::CanonicalOrigin& origin) {
  return server_.submit(wire::encode_auth_message(msg), origin, clock_());
}

namespace {

std::string endpoint_for(wire::MessageType type) {
  switch (type) {
    case wire::MessageType::Enrol: return "/enrol";
    case wire::MessageType::Verify: return "/login";
    case wire::MessageType::Change: return "/change";
  }
  return "/login";
}

std::string origin_query(const core::CanonicalOrigin& origin) {
  return "origin=" + httplib::detail::encode_query_param(origin.serialize());
}

}  // namespace

HttpLink::HttpLink(const std::string& base_url) {
  static const std::regex re(R"(^http://([A-Za-z0-9.\-]+|\[[0-9A-Fa-f:]+\])(?::([0-9]{1,5}))?/?$)");
  std::smatch m;
  if (!std::regex_match(base_url, m, re)) throw TransportFailure("unsupported server URL: " + base_url);
  host_ = m[1].str();
  if (m[2].matched) {
    port_ = std::stoi(m[2].str());
    if (port_ < 1 || port_ > 65535) throw TransportFailure("bad port in server URL: " + base_url);
  }
}

wire::ChallengeGrant HttpLink::challenge(const core::CanonicalOrigin& origin) {
  httplib::Client cli(host_, port_);
  cli.set_connection_timeout(5);
  cli.set_read_timeout(30);
  auto res = cli.Get("/challenge?" + origin_query(origin));
  if (!res) throw TransportFailure("GET /challenge: " + httplib::to_string(res.error()));
  if (res->status != 200) throw TransportFailure("GET /challenge: HTTP " + std::to_string(res->status));
  try {
    return wire::grant_from_json(nlohmann::json::parse(res->body));
  } catch (const std::exception& e) {
    throw TransportFailure(std::string("GET /challenge: bad response: ") + e.what());
  }
}

server::Decision HttpLink::send(const wire::AuthMessage& msg, const core::CanonicalOrigin& origin) {
  httplib::Client cli(host_, port_);
  cli.set_connection_timeout(5);
  cli.set_read_timeout(30);
  const std::string path = endpoint_for(msg.type);
  auto res = cli.Post(path + "?" + origin_query(origin), wire::auth_message_to_json(msg).dump(), "application/json");
  if (!res) throw TransportFailure("POST " + path + ": " + httplib::to_string(res.error()));
  try {
    return server::decision_from_json(nlohmann::json::parse(res->body));
  } catch (const std::exception& e) {
    throw TransportFailure("POST " + path + ": HTTP " + std::to_string(res->status) + " without a decision");
  }
}

wire::ChallengeGrant RecordingLink::challenge(const core::CanonicalOrigin& origin) {
  {
    std::lock_guard lock(mu_);
    const std::string req = "challenge " + origin.serialize();
    egress_.requests.emplace_back(req.begin(), req.end());
  }
  auto grant = inner_.challenge(origin);
  std::lock_guard lock(mu_);
  egress_.responses.push_back(wire::grant_to_json(grant).dump());
  return grant;
}

server::Decision RecordingLink::send(const wire::AuthMessage& msg, const core::CanonicalOrigin& origin) {
  {
    std::lock_guard lock(mu_);
    egress_.requests.push_back(wire::encode_auth_message(msg));
    const std::string json = wire::auth_message_to_json(msg).dump();
    egress_.requests.emplace_back(json.begin(), json.end());
    sent_.push_back(msg);
  }
  auto d = inner_.send(msg, origin);
  std::lock_guard lock(mu_);
  egress_.responses.push_back(server::decision_to_json(d).dump());
  return d;
}

Egress RecordingLink::egress() const {
  std::lock_guard lock(mu_);
  return egress_;
}

std::vector<wire::AuthMessage> RecordingLink::sent() const {
  std::lock_guard lock(mu_);
  return sent_;
}

}  // namespace credfield::agent
