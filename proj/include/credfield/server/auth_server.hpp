#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <string_view>
#include <vector>

#include "credfield/server/challenges.hpp"
#include "credfield/server/config.hpp"
#include "credfield/server/decision.hpp"
#include "credfield/server/store.hpp"
#include "credfield/wire/codec.hpp"

namespace credfield::server {

using EventSink = std::function<void(const PolicyEvent&)>;

/// Enrolment, verification and password change over one credential store.
///
/// Every flow takes the origin the message arrived at and the current time.
/// Challenges are consumed on redemption even when later checks fail. Only
/// policy outcomes (events, pending step-ups, browser registry) and
/// successful flows mutate the store; with a store path set, each mutation is
/// persisted before the call returns and rolled back if persisting fails.
class AuthServer {
 public:
  /// Throws ConfigError, StoreError.
  explicit AuthServer(ServerConfig config, std::filesystem::path store_path = {},
                      core::EntropySource entropy = core::system_entropy());

  const ServerConfig& config() const { return config_; }
  core::CanonicalOrigin default_origin() const;

  wire::ChallengeGrant issue_challenge(const core::CanonicalOrigin& origin, std::uint64_t now);
  Code redeem_challenge(const core::Challenge& nonce, const core::CanonicalOrigin& origin, std::uint64_t now);

  Decision enrol(const wire::AuthMessage& msg, const core::CanonicalOrigin& origin, std::uint64_t now);
  Decision verify(const wire::AuthMessage& msg, const core::CanonicalOrigin& origin, std::uint64_t now);
  Decision change_password(const wire::AuthMessage& msg, const core::CanonicalOrigin& origin, std::uint64_t now);

  /// Decodes and dispatches on the message type; decode failures are BadRequest.
  Decision submit(ByteView message, const core::CanonicalOrigin& origin, std::uint64_t now);

  void blacklist_browser(const core::StoredIdentifier& p_b);
  bool is_blacklisted(const core::StoredIdentifier& p_b) const;

  /// Completes a pending step-up after out-of-band confirmation by
  /// registering the browser. False if nothing was pending.
  bool confirm_step_up(std::string_view user_id, const core::StoredIdentifier& p_b, std::uint64_t now);

  std::optional<UserRecord> user(std::string_view user_id) const;
  std::vector<PolicyEvent> events() const;
  CredentialStore snapshot() const;

  /// Called after each event is recorded, outside the store lock.
  void set_event_sink(EventSink sink);

 private:
  Decision apply_browser_policy(std::string_view user_id, const core::StoredIdentifier& p_b, bool in_history,
                                std::uint64_t now, std::vector<PolicyEvent>& emitted);
  bool is_shared(const core::StoredIdentifier& p_b) const;
  void emit(PolicyEvent e, std::vector<PolicyEvent>& emitted);
  /// Persists or restores `before` and reports Internal.
  std::optional<Decision> commit(const CredentialStore& before);
  void notify(const std::vector<PolicyEvent>& emitted);

  ServerConfig config_;
  std::filesystem::path store_path_;
  ChallengeRegistry challenges_;

  mutable std::shared_mutex mu_;
  CredentialStore store_;
  EventSink sink_;
};

}  // namespace credfield::server
