#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "credfield/agent/link.hpp"
#include "credfield/core/credential.hpp"

namespace credfield::agent {

class ProfileError : public std::runtime_error {
 public:
  enum class Kind { IoError, CorruptProfile };
  ProfileError(Kind kind, const std::string& detail);
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Browser identity plus the two simulation knobs.
struct AgentProfile {
  static constexpr std::string_view kHeader = "credfield-profile v1";

  std::filesystem::path path;  // empty for an ephemeral profile
  core::SecretScalar browser_key;
  std::uint64_t created_at = 0;

  /// Added to the wall clock when stamping credentials.
  std::int64_t clock_skew = 0;
  /// Origin the agent believes it is on, in place of the real one.
  std::optional<core::CanonicalOrigin> perceived_origin_override;
};

/// Loads the key at `path`, or creates it exactly once (mode 0600).
/// Throws ProfileError.
AgentProfile open_profile(const std::filesystem::path& path, const core::EntropySource& entropy = core::system_entropy(),
                          const Clock& clock = system_clock());

/// Profile that lives only in memory, for tests and harnesses.
AgentProfile ephemeral_profile(core::SecretScalar key, std::uint64_t created_at = 0);

/// Reference browser-side field: fetches a challenge, derives, sends.
///
/// Passwords are consumed by derive and never stored on the agent.
class Agent {
 public:
  Agent(AgentProfile& profile, ServerLink& link, Clock clock = system_clock(), core::KdfParams kdf = {});

  server::Decision login(const core::CanonicalOrigin& true_origin, std::string_view user_id,
                         const SecretString& password);

  /// Compares V_p of both entries before contacting the server; a mismatch
  /// returns PasswordMismatch with no server traffic.
  server::Decision enrol_flow(const core::CanonicalOrigin& true_origin, std::string_view user_id,
                              const SecretString& password, const SecretString& password_repeat);

  server::Decision change_flow(const core::CanonicalOrigin& true_origin, std::string_view user_id,
                               const SecretString& old_password, const SecretString& new_password);

  /// The message login() would send for this challenge, without sending it.
  wire::AuthMessage build(wire::MessageType type, const core::Challenge& challenge,
                          const core::CanonicalOrigin& true_origin, std::string_view user_id,
                          const SecretString& password) const;

  /// Origin used for derivation: the override if set, else `true_origin`.
  const core::CanonicalOrigin& perceived_origin(const core::CanonicalOrigin& true_origin) const;
  std::uint64_t browser_time() const;

  /// P_b the server will file this browser under.
  core::StoredIdentifier browser_id() const;

 private:
  server::Decision run(wire::MessageType type, const core::CanonicalOrigin& true_origin, std::string_view user_id,
                       const SecretString& password, const SecretString* new_password);

  AgentProfile& profile_;
  ServerLink& link_;
  Clock clock_;
  core::KdfParams kdf_;
};

}  // namespace credfield::agent
