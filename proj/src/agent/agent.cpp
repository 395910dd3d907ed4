#include "credfield/agent/agent.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "credfield/core/error.hpp"
#include "credfield/wire/json.hpp"
#include "credfield/wire/records.hpp"

namespace credfield::agent {

namespace {

[[noreturn]] void corrupt(const std::filesystem::path& path, const std::string& what) {
  throw ProfileError(ProfileError::Kind::CorruptProfile, path.string() + ": " + what);
}

AgentProfile parse_profile(const std::filesystem::path& path, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != AgentProfile::kHeader) corrupt(path, "unsupported header");
  std::optional<Bytes> key;
  std::optional<std::uint64_t> created;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = wire::split_fields(line);
    if (f.size() != 2) corrupt(path, "malformed line");
    try {
      if (f[0] == "key" && !key) {
        key = from_hex(f[1]);
      } else if (f[0] == "created" && !created) {
        created = wire::decode_counter(f[1]);
      } else {
        corrupt(path, "unexpected field");
      }
    } catch (const std::invalid_argument&) {
      corrupt(path, "bad value");
    } catch (const wire::RecordError&) {
      corrupt(path, "bad value");
    }
  }
  if (!key || !created) corrupt(path, "missing field");
  if (key->size() != core::kScalarSize) corrupt(path, "bad key length");
  try {
    AgentProfile p{path, core::SecretScalar::from_bytes(*key), *created, 0, std::nullopt};
    secure_wipe(*key);
    return p;
  } catch (const core::CoreError&) {
    secure_wipe(*key);
    corrupt(path, "key out of range");
  }
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProfileError(ProfileError::Kind::IoError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

ProfileError::ProfileError(Kind kind, const std::string& detail)
    : std::runtime_error(std::string(kind == Kind::IoError ? "IoError" : "CorruptProfile") + ": " + detail),
      kind_(kind) {}

AgentProfile open_profile(const std::filesystem::path& path, const core::EntropySource& entropy, const Clock& clock) {
  // O_EXCL makes creation happen at most once even with racing openers.
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0600);
  if (fd < 0) {
    if (errno != EEXIST) {
      throw ProfileError(ProfileError::Kind::IoError, "cannot create " + path.string() + ": " + std::strerror(errno));
    }
    return parse_profile(path, read_all(path));
  }
  core::SecretScalar key = core::generate_browser_key(entropy);
  const std::uint64_t created = clock();
  std::string text = std::string(AgentProfile::kHeader) + "\nkey " + to_hex(key.reveal()) + "\ncreated " +
                     std::to_string(created) + "\n";
  std::size_t written = 0;
  bool ok = true;
  while (written < text.size()) {
    const ssize_t n = ::write(fd, text.data() + written, text.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      ok = false;
      break;
    }
    written += static_cast<std::size_t>(n);
  }
  ok = ok && ::fsync(fd) == 0;
  ::close(fd);
  secure_wipe({reinterpret_cast<std::uint8_t*>(text.data()), text.size()});
  if (!ok) {
    ::unlink(path.c_str());
    throw ProfileError(ProfileError::Kind::IoError, "cannot write " + path.string());
  }
  return AgentProfile{path, std::move(key), created, 0, std::nullopt};
}

AgentProfile ephemeral_profile(core::SecretScalar key, std::uint64_t created_at) {
  return AgentProfile{{}, std::move(key), created_at, 0, std::nullopt};
}

Agent::Agent(AgentProfile& profile, ServerLink& link, Clock clock, core::KdfParams kdf)
    : profile_(profile), link_(link), clock_(std::move(clock)), kdf_(kdf) {}

const core::CanonicalOrigin& Agent::perceived_origin(const core::CanonicalOrigin& true_origin) const {
  return profile_.perceived_origin_override ? *profile_.perceived_origin_override : true_origin;
}

std::uint64_t Agent::browser_time() const {
  const std::uint64_t now = clock_();
  if (profile_.clock_skew < 0) {
    const auto back = static_cast<std::uint64_t>(-profile_.clock_skew);
    return now > back ? now - back : 0;
  }
  return now + static_cast<std::uint64_t>(profile_.clock_skew);
}

core::StoredIdentifier Agent::browser_id() const {
  return core::store_browser_identifier(core::PublicKey::from_secret(profile_.browser_key), kdf_);
}

wire::AuthMessage Agent::build(wire::MessageType type, const core::Challenge& challenge,
                               const core::CanonicalOrigin& true_origin, std::string_view user_id,
                               const SecretString& password) const {
  return wire::AuthMessage{wire::kWireVersion,
                           type,
                           std::string(user_id),
                           challenge,
                           core::derive(user_id, challenge, password, perceived_origin(true_origin), browser_time(),
                                        profile_.browser_key, kdf_),
                           std::nullopt};
}

server::Decision Agent::run(wire::MessageType type, const core::CanonicalOrigin& true_origin,
                            std::string_view user_id, const SecretString& password, const SecretString* new_password) {
  try {
    const auto grant = link_.challenge(true_origin);
    auto msg = build(type, grant.challenge, true_origin, user_id, password);
    if (new_password != nullptr) {
      msg.cred_new = core::derive(user_id, grant.challenge, *new_password, perceived_origin(true_origin),
                                  msg.cred.browser_time, profile_.browser_key, kdf_);
    }
    return link_.send(msg, true_origin);
  } catch (const TransportFailure& e) {
    return server::Decision::of(server::Code::TransportError, e.what());
  } catch (const core::CoreError& e) {
    // Input problems (empty password, oversized user id) never reach the server.
    return server::Decision::of(server::Code::BadRequest, std::string(core::to_string(e.code())));
  }
}

server::Decision Agent::login(const core::CanonicalOrigin& true_origin, std::string_view user_id,
                              const SecretString& password) {
  return run(wire::MessageType::Verify, true_origin, user_id, password, nullptr);
}

server::Decision Agent::enrol_flow(const core::CanonicalOrigin& true_origin, std::string_view user_id,
                                   const SecretString& password, const SecretString& password_repeat) {
  try {
    const auto& origin = perceived_origin(true_origin);
    if (!(core::password_public_key(password, origin, user_id, kdf_) ==
          core::password_public_key(password_repeat, origin, user_id, kdf_))) {
      return server::Decision::of(server::Code::PasswordMismatch, "password entries differ");
    }
  } catch (const core::CoreError& e) {
    return server::Decision::of(server::Code::BadRequest, std::string(core::to_string(e.code())));
  }
  return run(wire::MessageType::Enrol, true_origin, user_id, password, nullptr);
}

server::Decision Agent::change_flow(const core::CanonicalOrigin& true_origin, std::string_view user_id,
                                    const SecretString& old_password, const SecretString& new_password) {
  return run(wire::MessageType::Change, true_origin, user_id, old_password, &new_password);
}

}  // namespace credfield::agent
