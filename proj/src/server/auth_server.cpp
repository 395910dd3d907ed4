#include "credfield/server/auth_server.hpp"

#include <algorithm>
#include <mutex>

#include "credfield/core/error.hpp"

namespace credfield::server {

namespace {

using core::StoredIdentifier;
using wire::AuthMessage;
using wire::MessageType;

Decision reject(Code code, std::string detail = {}) { return Decision::of(code, std::move(detail)); }

bool in_history(const UserRecord& u, const StoredIdentifier& p_b) {
  return std::any_of(u.browsers.begin(), u.browsers.end(), [&](const BrowserEntry& b) { return b.p_b == p_b; });
}

// Maps library exceptions escaping a flow onto decisions.
template <typename Fn>
Decision guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const core::CoreError& e) {
    if (e.code() == core::Errc::CryptoFailure || e.code() == core::Errc::EntropyFailure) {
      return reject(Code::Internal, "crypto backend failure");
    }
    return reject(Code::BadRequest, std::string(core::to_string(e.code())));
  } catch (const StoreError& e) {
    return reject(Code::Internal, e.kind() == StoreError::Kind::IoError ? "store write failed" : "store corrupt");
  }
}

}  // namespace

AuthServer::AuthServer(ServerConfig config, std::filesystem::path store_path, core::EntropySource entropy)
    : config_(std::move(config)),
      store_path_(std::move(store_path)),
      challenges_(config_.challenge_ttl, std::move(entropy)) {
  config_.validate();
  store_ = CredentialStore::load(store_path_);
  // A smaller cap than the one the store was written under trims on load.
  std::vector<std::string> ids;
  for (const auto& [id, u] : store_.users()) ids.push_back(id);
  for (const auto& id : ids) store_.enforce_cap(id, config_.policy.history_cap);
}

core::CanonicalOrigin AuthServer::default_origin() const { return core::CanonicalOrigin::parse(config_.origin); }

wire::ChallengeGrant AuthServer::issue_challenge(const core::CanonicalOrigin& origin, std::uint64_t now) {
  return challenges_.issue(origin, now);
}

Code AuthServer::redeem_challenge(const core::Challenge& nonce, const core::CanonicalOrigin& origin,
                                  std::uint64_t now) {
  return challenges_.redeem(nonce, origin, now);
}

bool AuthServer::is_shared(const StoredIdentifier& p_b) const {
  return store_.browser_user_count(p_b) >= config_.policy.shared_browser_user_threshold;
}

void AuthServer::emit(PolicyEvent e, std::vector<PolicyEvent>& emitted) {
  store_.append_event(e);
  emitted.push_back(std::move(e));
}

std::optional<Decision> AuthServer::commit(const CredentialStore& before) {
  if (store_path_.empty()) return std::nullopt;
  try {
    store_.persist(store_path_);
    return std::nullopt;
  } catch (const StoreError&) {
    store_ = before;
    return reject(Code::Internal, "store write failed");
  }
}

void AuthServer::notify(const std::vector<PolicyEvent>& emitted) {
  EventSink sink;
  {
    std::shared_lock lock(mu_);
    sink = sink_;
  }
  if (!sink) return;
  for (const auto& e : emitted) sink(e);
}

// Caller holds the unique lock.
Decision AuthServer::apply_browser_policy(std::string_view user_id, const StoredIdentifier& p_b, bool in_hist,
                                          std::uint64_t now, std::vector<PolicyEvent>& emitted) {
  const PolicyParams& policy = config_.policy;
  const bool shared = is_shared(p_b);
  if (policy.blacklist_enforced && (store_.is_blacklisted(p_b) || (shared && policy.deny_shared_browsers))) {
    emit(PolicyEvent{EventKind::BlacklistDenied, std::string(user_id), p_b, now}, emitted);
    Decision d = reject(Code::BlacklistDenied, shared && !store_.is_blacklisted(p_b) ? "browser shared by too many users"
                                                                                     : "browser is blacklisted");
    d.browser_id = p_b;
    return d;
  }

  Decision d = Decision::of(Code::Accept);
  d.browser_id = p_b;
  if (in_hist && !shared) {
    store_.touch_browser(user_id, p_b, now);
    d.browser_known = true;
    return d;
  }

  switch (policy.unknown_browser_action) {
    case UnknownBrowserAction::StepUp:
      store_.add_pending(PendingStepUp{std::string(user_id), p_b, now});
      emit(PolicyEvent{EventKind::StepUpRequired, std::string(user_id), p_b, now}, emitted);
      d.code = Code::StepUpRequired;
      d.detail = "unrecognised browser";
      return d;
    case UnknownBrowserAction::AllowAndAlert:
    case UnknownBrowserAction::AllowAndNotify: {
      if (in_hist) {
        store_.touch_browser(user_id, p_b, now);
      } else {
        store_.register_browser(user_id, BrowserEntry{p_b, now, now, 1}, policy.history_cap);
      }
      const EventKind kind = policy.unknown_browser_action == UnknownBrowserAction::AllowAndAlert
                                 ? EventKind::UnknownBrowserAlert
                                 : EventKind::NewBrowserNotification;
      emit(PolicyEvent{kind, std::string(user_id), p_b, now}, emitted);
      return d;
    }
  }
  return reject(Code::Internal);
}

Decision AuthServer::enrol(const AuthMessage& msg, const core::CanonicalOrigin& origin, std::uint64_t now) {
  if (msg.type != MessageType::Enrol) return reject(Code::BadRequest, "not an enrol message");
  const Code redeemed = challenges_.redeem(msg.challenge, origin, now);
  if (redeemed != Code::Accept) return reject(redeemed);

  std::vector<PolicyEvent> emitted;
  Decision result = guarded([&]() -> Decision {
    {
      std::shared_lock lock(mu_);
      if (store_.has_user(msg.user_id)) return reject(Code::UserExists);
    }
    // Proof of possession: the credential must verify against its own keys.
    const StoredIdentifier p_p = core::store_password_identifier(msg.user_id, msg.cred.v_p, config_.kdf);
    const core::VerifyOutcome outcome = core::verify_credential_stateless(
        msg.user_id, msg.challenge, now, msg.cred, p_p, {}, config_.window(), config_.kdf);
    if (!outcome.accepted) return reject(from_reject(*outcome.reason));
    const StoredIdentifier p_b = *outcome.browser_id;

    std::unique_lock lock(mu_);
    if (store_.has_user(msg.user_id)) return reject(Code::UserExists);
    const CredentialStore before = store_path_.empty() ? CredentialStore{} : store_;
    const PolicyParams& policy = config_.policy;
    if (policy.blacklist_enforced &&
        (store_.is_blacklisted(p_b) || (policy.deny_shared_browsers && is_shared(p_b)))) {
      emit(PolicyEvent{EventKind::BlacklistDenied, msg.user_id, p_b, now}, emitted);
      if (auto failed = commit(before)) {
        emitted.clear();
        return *failed;
      }
      return reject(Code::BlacklistDenied, "browser may not enrol");
    }
    UserRecord record;
    record.user_id = msg.user_id;
    record.p_p = p_p;
    record.browsers.push_back(BrowserEntry{p_b, now, now, 0});
    record.created_at = now;
    record.updated_at = now;
    store_.add_user(std::move(record));
    if (auto failed = commit(before)) return *failed;
    Decision d = Decision::of(Code::Enrolled);
    d.browser_known = true;
    d.browser_id = p_b;
    return d;
  });
  notify(emitted);
  return result;
}

Decision AuthServer::verify(const AuthMessage& msg, const core::CanonicalOrigin& origin, std::uint64_t now) {
  if (msg.type != MessageType::Verify) return reject(Code::BadRequest, "not a verify message");
  const Code redeemed = challenges_.redeem(msg.challenge, origin, now);
  if (redeemed != Code::Accept) return reject(redeemed);

  std::vector<PolicyEvent> emitted;
  Decision result = guarded([&]() -> Decision {
    UserRecord snapshot;
    std::vector<StoredIdentifier> known;
    {
      std::shared_lock lock(mu_);
      const UserRecord* u = store_.find_user(msg.user_id);
      if (u == nullptr) return reject(Code::UnknownUser);
      snapshot = *u;
      for (const auto& b : u->browsers) {
        if (!is_shared(b.p_b)) known.push_back(b.p_b);
      }
    }
    const core::VerifyOutcome outcome = core::verify_credential_stateless(
        msg.user_id, msg.challenge, now, msg.cred, snapshot.p_p, known, config_.window(), config_.kdf);
    if (!outcome.accepted) return reject(from_reject(*outcome.reason));
    const StoredIdentifier p_b = *outcome.browser_id;

    std::unique_lock lock(mu_);
    const UserRecord* u = store_.find_user(msg.user_id);
    // A concurrent password change invalidates what was just checked.
    if (u == nullptr || !(u->p_p == snapshot.p_p)) return reject(Code::UnknownPassword);
    const CredentialStore before = store_path_.empty() ? CredentialStore{} : store_;
    Decision d = apply_browser_policy(msg.user_id, p_b, in_history(*u, p_b), now, emitted);
    if (auto failed = commit(before)) {
      emitted.clear();
      return *failed;
    }
    return d;
  });
  notify(emitted);
  return result;
}

Decision AuthServer::change_password(const AuthMessage& msg, const core::CanonicalOrigin& origin,
                                     std::uint64_t now) {
  if (msg.type != MessageType::Change || !msg.cred_new) return reject(Code::BadRequest, "not a change message");
  const Code redeemed = challenges_.redeem(msg.challenge, origin, now);
  if (redeemed != Code::Accept) return reject(redeemed);

  std::vector<PolicyEvent> emitted;
  Decision result = guarded([&]() -> Decision {
    UserRecord snapshot;
    std::vector<StoredIdentifier> known;
    {
      std::shared_lock lock(mu_);
      const UserRecord* u = store_.find_user(msg.user_id);
      if (u == nullptr) return reject(Code::UnknownUser);
      snapshot = *u;
      for (const auto& b : u->browsers) {
        if (!is_shared(b.p_b)) known.push_back(b.p_b);
      }
    }
    const core::VerifyOutcome old_outcome = core::verify_credential_stateless(
        msg.user_id, msg.challenge, now, msg.cred, snapshot.p_p, known, config_.window(), config_.kdf);
    if (!old_outcome.accepted) return reject(from_reject(*old_outcome.reason));

    const core::Credential& fresh = *msg.cred_new;
    if (!(fresh.v_b == msg.cred.v_b)) return reject(Code::BrowserMismatch, "new credential from another browser");
    const StoredIdentifier new_p_p = core::store_password_identifier(msg.user_id, fresh.v_p, config_.kdf);
    const core::VerifyOutcome new_outcome = core::verify_credential_stateless(
        msg.user_id, msg.challenge, now, fresh, new_p_p, {}, config_.window(), config_.kdf);
    if (!new_outcome.accepted) return reject(from_reject(*new_outcome.reason), "new credential");
    const StoredIdentifier p_b = *old_outcome.browser_id;

    std::unique_lock lock(mu_);
    const UserRecord* u = store_.find_user(msg.user_id);
    if (u == nullptr || !(u->p_p == snapshot.p_p)) return reject(Code::UnknownPassword);
    const CredentialStore before = store_path_.empty() ? CredentialStore{} : store_;
    Decision d = apply_browser_policy(msg.user_id, p_b, in_history(*u, p_b), now, emitted);
    if (d.code == Code::Accept) {
      store_.set_password_identifier(msg.user_id, new_p_p, now);
      d.code = Code::PasswordChanged;
    }
    if (auto failed = commit(before)) {
      emitted.clear();
      return *failed;
    }
    return d;
  });
  notify(emitted);
  return result;
}

Decision AuthServer::submit(ByteView message, const core::CanonicalOrigin& origin, std::uint64_t now) {
  std::optional<AuthMessage> msg;
  try {
    msg = wire::decode_auth_message(message);
  } catch (const wire::DecodeError& e) {
    return reject(Code::BadRequest, std::string(wire::to_string(e.code())));
  }
  switch (msg->type) {
    case MessageType::Enrol: return enrol(*msg, origin, now);
    case MessageType::Verify: return verify(*msg, origin, now);
    case MessageType::Change: return change_password(*msg, origin, now);
  }
  return reject(Code::BadRequest);
}

void AuthServer::blacklist_browser(const StoredIdentifier& p_b) {
  std::unique_lock lock(mu_);
  const CredentialStore before = store_path_.empty() ? CredentialStore{} : store_;
  store_.blacklist(p_b);
  if (auto failed = commit(before)) throw StoreError(StoreError::Kind::IoError, failed->detail);
}

bool AuthServer::is_blacklisted(const StoredIdentifier& p_b) const {
  std::shared_lock lock(mu_);
  return store_.is_blacklisted(p_b);
}

bool AuthServer::confirm_step_up(std::string_view user_id, const StoredIdentifier& p_b, std::uint64_t now) {
  std::unique_lock lock(mu_);
  if (!store_.has_user(user_id)) return false;
  const CredentialStore before = store_path_.empty() ? CredentialStore{} : store_;
  if (!store_.take_pending(user_id, p_b)) return false;
  store_.register_browser(user_id, BrowserEntry{p_b, now, now, 0}, config_.policy.history_cap);
  if (auto failed = commit(before)) throw StoreError(StoreError::Kind::IoError, failed->detail);
  return true;
}

std::optional<UserRecord> AuthServer::user(std::string_view user_id) const {
  std::shared_lock lock(mu_);
  const UserRecord* u = store_.find_user(user_id);
  if (u == nullptr) return std::nullopt;
  return *u;
}

std::vector<PolicyEvent> AuthServer::events() const {
  std::shared_lock lock(mu_);
  return store_.events();
}

CredentialStore AuthServer::snapshot() const {
  std::shared_lock lock(mu_);
  return store_;
}

void AuthServer::set_event_sink(EventSink sink) {
  std::unique_lock lock(mu_);
  sink_ = std::move(sink);
}

}  // namespace credfield::server
