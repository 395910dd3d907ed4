#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include "credfield/core/credential.hpp"
#include "credfield/server/auth_server.hpp"
#include "credfield/wire/codec.hpp"

namespace testsupport {

inline const credfield::core::CanonicalOrigin& bank() {
  static const auto o = credfield::core::CanonicalOrigin::parse("https://bank.example");
  return o;
}

/// Browser key derived from a label so tests can recreate the same "device".
inline credfield::core::SecretScalar browser_key(std::string_view label) {
  const auto d = credfield::core::sha256(credfield::as_bytes(label));
  return credfield::core::SecretScalar::from_bytes(d);
}

inline credfield::core::Credential credential_for(const credfield::core::Challenge& challenge, std::string_view user,
                                                  std::string_view password, const credfield::core::CanonicalOrigin& origin,
                                                  std::uint64_t browser_time, const credfield::core::SecretScalar& key,
                                                  const credfield::core::KdfParams& kdf = {}) {
  return credfield::core::derive(user, challenge, credfield::SecretString(password), origin, browser_time, key, kdf);
}

inline credfield::wire::AuthMessage message_for(credfield::wire::MessageType type, const credfield::core::Challenge& challenge,
                                                std::string_view user, std::string_view password,
                                                const credfield::core::CanonicalOrigin& origin, std::uint64_t browser_time,
                                                const credfield::core::SecretScalar& key) {
  return credfield::wire::AuthMessage{credfield::wire::kWireVersion, type, std::string(user), challenge,
                                      credential_for(challenge, user, password, origin, browser_time, key), std::nullopt};
}

/// Drives an AuthServer the way a browser would, with an explicit clock.
class Session {
 public:
  Session(credfield::server::AuthServer& server, std::uint64_t now = 1700000000) : server_(server), now_(now) {}

  std::uint64_t now() const { return now_; }
  void advance(std::uint64_t seconds) { now_ += seconds; }

  credfield::wire::AuthMessage build(credfield::wire::MessageType type, std::string_view user, std::string_view password,
                                     const credfield::core::SecretScalar& key,
                                     const credfield::core::CanonicalOrigin& origin = bank()) {
    const auto grant = server_.issue_challenge(bank(), now_);
    return message_for(type, grant.challenge, user, password, origin, now_, key);
  }

  credfield::server::Decision enrol(std::string_view user, std::string_view password,
                                    const credfield::core::SecretScalar& key) {
    return server_.enrol(build(credfield::wire::MessageType::Enrol, user, password, key), bank(), now_);
  }

  credfield::server::Decision login(std::string_view user, std::string_view password,
                                    const credfield::core::SecretScalar& key) {
    return server_.verify(build(credfield::wire::MessageType::Verify, user, password, key), bank(), now_);
  }

  credfield::wire::AuthMessage build_change(std::string_view user, std::string_view old_password,
                                            std::string_view new_password, const credfield::core::SecretScalar& key,
                                            const credfield::core::SecretScalar& new_key) {
    const auto grant = server_.issue_challenge(bank(), now_);
    auto msg = message_for(credfield::wire::MessageType::Change, grant.challenge, user, old_password, bank(), now_, key);
    msg.cred_new = credential_for(grant.challenge, user, new_password, bank(), now_, new_key);
    return msg;
  }

  credfield::server::Decision change(std::string_view user, std::string_view old_password,
                                     std::string_view new_password, const credfield::core::SecretScalar& key) {
    return server_.change_password(build_change(user, old_password, new_password, key, key), bank(), now_);
  }

 private:
  credfield::server::AuthServer& server_;
  std::uint64_t now_;
};

inline credfield::server::ServerConfig config_for(credfield::server::PolicyMode mode) {
  credfield::server::ServerConfig cfg;
  cfg.policy = credfield::server::PolicyParams::defaults(mode);
  return cfg;
}

/// Fresh directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "credfield-test-XXXXXX").string();
    if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string file_digest(const std::filesystem::path& p) {
  return credfield::to_hex(credfield::core::sha256(credfield::as_bytes(read_file(p))));
}

}  // namespace testsupport
