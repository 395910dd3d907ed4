#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "credfield/server/auth_server.hpp"
#include "credfield/wire/codec.hpp"

namespace credfield::agent {

using Clock = std::function<std::uint64_t()>;

/// Seconds since the Unix epoch.
Clock system_clock();

/// The server could not be reached or answered outside the protocol.
class TransportFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How an agent reaches a server. `origin` is the origin the request arrives
/// at, which the server binds challenges to.
class ServerLink {
 public:
  virtual ~ServerLink() = default;
  /// Throws TransportFailure.
  virtual wire::ChallengeGrant challenge(const core::CanonicalOrigin& origin) = 0;
  /// Server rejections come back as decisions; only transport problems throw.
  virtual server::Decision send(const wire::AuthMessage& msg, const core::CanonicalOrigin& origin) = 0;
};

/// Calls an AuthServer directly through its binary entry point.
class InProcessLink : public ServerLink {
 public:
  explicit InProcessLink(server::AuthServer& server, Clock clock = system_clock());

  wire::ChallengeGrant challenge(const core::CanonicalOrigin& origin) override;
  server::Decision send(const wire::AuthMessage& msg, const core::CanonicalOrigin& origin) override;

 private:
  server::AuthServer& server_;
  Clock clock_;
};

/// JSON over HTTP against the service endpoints.
class HttpLink : public ServerLink {
 public:
  /// `base_url` like "http://127.0.0.1:8080". Throws TransportFailure if unparseable.
  explicit HttpLink(const std::string& base_url);

  wire::ChallengeGrant challenge(const core::CanonicalOrigin& origin) override;
  server::Decision send(const wire::AuthMessage& msg, const core::CanonicalOrigin& origin) override;

 private:
  std::string host_;
  int port_ = 80;
};

/// Everything that left the agent through one link, as serialized bytes.
struct Egress {
  std::vector<Bytes> requests;
  std::vector<std::string> responses;
};

/// Forwards to another link and records both directions.
class RecordingLink : public ServerLink {
 public:
  explicit RecordingLink(ServerLink& inner) : inner_(inner) {}

  wire::ChallengeGrant challenge(const core::CanonicalOrigin& origin) override;
  server::Decision send(const wire::AuthMessage& msg, const core::CanonicalOrigin& origin) override;

  Egress egress() const;
  std::vector<wire::AuthMessage> sent() const;

 private:
  ServerLink& inner_;
  mutable std::mutex mu_;
  Egress egress_;
  std::vector<wire::AuthMessage> sent_;
};

}  // namespace credfield::agent
