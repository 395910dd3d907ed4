#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "credfield/core/credential.hpp"
#include "credfield/wire/records.hpp"

namespace credfield::server {

using wire::BrowserEntry;
using wire::UserRecord;

enum class EventKind { StepUpRequired, UnknownBrowserAlert, NewBrowserNotification, BlacklistDenied };

std::string_view to_string(EventKind kind);

struct PolicyEvent {
  EventKind kind = EventKind::StepUpRequired;
  std::string user_id;
  core::StoredIdentifier p_b;
  std::uint64_t at = 0;

  friend bool operator==(const PolicyEvent&, const PolicyEvent&) = default;
};

/// Unknown browser waiting for out-of-band confirmation.
struct PendingStepUp {
  std::string user_id;
  core::StoredIdentifier p_b;
  std::uint64_t at = 0;

  friend bool operator==(const PendingStepUp&, const PendingStepUp&) = default;
};

class StoreError : public std::runtime_error {
 public:
  enum class Kind { IoError, CorruptStore };
  StoreError(Kind kind, const std::string& detail);
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Users, browser registry, blacklist, policy events and pending step-ups.
/// Not synchronized; AuthServer owns the locking.
class CredentialStore {
 public:
  static constexpr std::string_view kHeader = "credfield-store v1";

  const UserRecord* find_user(std::string_view user_id) const;
  bool has_user(std::string_view user_id) const { return find_user(user_id) != nullptr; }
  const std::map<std::string, UserRecord, std::less<>>& users() const { return users_; }

  /// False if the user already exists.
  bool add_user(UserRecord record);
  void set_password_identifier(std::string_view user_id, const core::StoredIdentifier& p_p, std::uint64_t now);

  /// Appends the entry, evicting least-recently-seen entries beyond cap.
  /// Returns the evicted identifiers.
  std::vector<core::StoredIdentifier> register_browser(std::string_view user_id, const BrowserEntry& entry,
                                                       std::size_t cap);
  /// Bumps last_seen and login_count of an existing entry.
  void touch_browser(std::string_view user_id, const core::StoredIdentifier& p_b, std::uint64_t now);
  /// Evicts down to cap; returns how many entries were removed.
  std::size_t enforce_cap(std::string_view user_id, std::size_t cap);

  /// Distinct users whose history contains p_b.
  std::size_t browser_user_count(const core::StoredIdentifier& p_b) const;

  void blacklist(const core::StoredIdentifier& p_b) { blacklist_.insert(p_b); }
  bool is_blacklisted(const core::StoredIdentifier& p_b) const { return blacklist_.contains(p_b); }
  const std::set<core::StoredIdentifier>& blacklisted() const { return blacklist_; }

  void append_event(PolicyEvent e) { events_.push_back(std::move(e)); }
  const std::vector<PolicyEvent>& events() const { return events_; }

  void add_pending(PendingStepUp p);
  /// Removes and returns true if present.
  bool take_pending(std::string_view user_id, const core::StoredIdentifier& p_b);
  const std::vector<PendingStepUp>& pending() const { return pending_; }

  /// Header, one record per line, then `end <records> <sha256-hex>` over
  /// everything before the trailer.
  std::string serialize() const;
  /// Throws StoreError{CorruptStore}; never returns a partial store.
  static CredentialStore parse(std::string_view text);

  /// Atomic: writes a sibling temp file, fsyncs it and renames over path.
  void persist(const std::filesystem::path& path) const;
  /// Missing or empty file, or empty path, yields an empty store.
  static CredentialStore load(const std::filesystem::path& path);

  friend bool operator==(const CredentialStore& a, const CredentialStore& b) {
    return a.users_ == b.users_ && a.blacklist_ == b.blacklist_ && a.events_ == b.events_ && a.pending_ == b.pending_;
  }

 private:
  UserRecord* find_mut(std::string_view user_id);
  void index_add(const core::StoredIdentifier& p_b);
  void index_remove(const core::StoredIdentifier& p_b);

  std::map<std::string, UserRecord, std::less<>> users_;
  std::map<core::StoredIdentifier, std::size_t> browser_users_;
  std::set<core::StoredIdentifier> blacklist_;
  std::vector<PolicyEvent> events_;
  std::vector<PendingStepUp> pending_;
};

}  // namespace credfield::server
