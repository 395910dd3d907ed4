#include "credfield/server/store.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "credfield/core/kdf.hpp"
#include "credfield/wire/json.hpp"

namespace credfield::server {

namespace {

[[noreturn]] void corrupt(const std::string& what) { throw StoreError(StoreError::Kind::CorruptStore, what); }

[[noreturn]] void io_error(const std::string& what) {
  throw StoreError(StoreError::Kind::IoError, what + ": " + std::strerror(errno));
}

EventKind event_kind_from_string(std::string_view name) {
  for (auto k : {EventKind::StepUpRequired, EventKind::UnknownBrowserAlert, EventKind::NewBrowserNotification,
                 EventKind::BlacklistDenied}) {
    if (to_string(k) == name) return k;
  }
  corrupt("unknown event kind");
}

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::StepUpRequired: return "StepUpRequired";
    case EventKind::UnknownBrowserAlert: return "UnknownBrowserAlert";
    case EventKind::NewBrowserNotification: return "NewBrowserNotification";
    case EventKind::BlacklistDenied: return "BlacklistDenied";
  }
  return "Unknown";
}

StoreError::StoreError(Kind kind, const std::string& detail)
    : std::runtime_error(std::string(kind == Kind::IoError ? "IoError" : "CorruptStore") + ": " + detail),
      kind_(kind) {}

const UserRecord* CredentialStore::find_user(std::string_view user_id) const {
  auto it = users_.find(user_id);
  return it == users_.end() ? nullptr : &it->second;
}

UserRecord* CredentialStore::find_mut(std::string_view user_id) {
  auto it = users_.find(user_id);
  return it == users_.end() ? nullptr : &it->second;
}

bool CredentialStore::add_user(UserRecord record) {
  if (users_.contains(record.user_id)) return false;
  for (const auto& b : record.browsers) index_add(b.p_b);
  std::string key = record.user_id;
  users_.emplace(std::move(key), std::move(record));
  return true;
}

void CredentialStore::set_password_identifier(std::string_view user_id, const core::StoredIdentifier& p_p,
                                              std::uint64_t now) {
  UserRecord* u = find_mut(user_id);
  if (u == nullptr) throw std::logic_error("set_password_identifier: no such user");
  u->p_p = p_p;
  u->updated_at = std::max(u->updated_at, now);
}

std::vector<core::StoredIdentifier> CredentialStore::register_browser(std::string_view user_id,
                                                                      const BrowserEntry& entry, std::size_t cap) {
  UserRecord* u = find_mut(user_id);
  if (u == nullptr) throw std::logic_error("register_browser: no such user");
  auto same = [&](const BrowserEntry& b) { return b.p_b == entry.p_b; };
  if (std::any_of(u->browsers.begin(), u->browsers.end(), same)) {
    touch_browser(user_id, entry.p_b, entry.last_seen);
    return {};
  }
  std::vector<core::StoredIdentifier> evicted;
  while (!u->browsers.empty() && u->browsers.size() >= cap) {
    auto victim = std::min_element(u->browsers.begin(), u->browsers.end(),
                                   [](const BrowserEntry& a, const BrowserEntry& b) { return a.last_seen < b.last_seen; });
    evicted.push_back(victim->p_b);
    index_remove(victim->p_b);
    u->browsers.erase(victim);
  }
  u->browsers.push_back(entry);
  index_add(entry.p_b);
  u->updated_at = std::max(u->updated_at, entry.last_seen);
  return evicted;
}

void CredentialStore::touch_browser(std::string_view user_id, const core::StoredIdentifier& p_b, std::uint64_t now) {
  UserRecord* u = find_mut(user_id);
  if (u == nullptr) return;
  for (auto& b : u->browsers) {
    if (b.p_b == p_b) {
      b.last_seen = std::max(b.last_seen, now);
      ++b.login_count;
      return;
    }
  }
}

std::size_t CredentialStore::enforce_cap(std::string_view user_id, std::size_t cap) {
  UserRecord* u = find_mut(user_id);
  if (u == nullptr) return 0;
  std::size_t removed = 0;
  while (u->browsers.size() > cap) {
    auto victim = std::min_element(u->browsers.begin(), u->browsers.end(),
                                   [](const BrowserEntry& a, const BrowserEntry& b) { return a.last_seen < b.last_seen; });
    index_remove(victim->p_b);
    u->browsers.erase(victim);
    ++removed;
  }
  return removed;
}

std::size_t CredentialStore::browser_user_count(const core::StoredIdentifier& p_b) const {
  auto it = browser_users_.find(p_b);
  return it == browser_users_.end() ? 0 : it->second;
}

void CredentialStore::index_add(const core::StoredIdentifier& p_b) { ++browser_users_[p_b]; }

void CredentialStore::index_remove(const core::StoredIdentifier& p_b) {
  auto it = browser_users_.find(p_b);
  if (it == browser_users_.end()) return;
  if (--it->second == 0) browser_users_.erase(it);
}

void CredentialStore::add_pending(PendingStepUp p) {
  auto it = std::find_if(pending_.begin(), pending_.end(),
                         [&](const PendingStepUp& q) { return q.user_id == p.user_id && q.p_b == p.p_b; });
  if (it != pending_.end()) {
    it->at = p.at;
    return;
  }
  pending_.push_back(std::move(p));
}

bool CredentialStore::take_pending(std::string_view user_id, const core::StoredIdentifier& p_b) {
  auto it = std::find_if(pending_.begin(), pending_.end(),
                         [&](const PendingStepUp& q) { return q.user_id == user_id && q.p_b == p_b; });
  if (it == pending_.end()) return false;
  pending_.erase(it);
  return true;
}

std::string CredentialStore::serialize() const {
  std::string body;
  std::size_t records = 0;
  body += kHeader;
  body += '\n';
  for (const auto& [id, user] : users_) {
    body += wire::format_user_record(user);
    records += 1 + user.browsers.size();
  }
  for (const auto& p_b : blacklist_) {
    body += "blacklist " + wire::encode_identifier(p_b) + '\n';
    ++records;
  }
  for (const auto& e : events_) {
    body += "event " + std::string(to_string(e.kind)) + ' ' + wire::encode_text_field(e.user_id) + ' ' +
            wire::encode_identifier(e.p_b) + ' ' + wire::u64_to_decimal(e.at) + '\n';
    ++records;
  }
  for (const auto& p : pending_) {
    body += "pending " + wire::encode_text_field(p.user_id) + ' ' + wire::encode_identifier(p.p_b) + ' ' +
            wire::u64_to_decimal(p.at) + '\n';
    ++records;
  }
  const auto digest = core::sha256(as_bytes(body));
  body += "end " + std::to_string(records) + ' ' + to_hex(digest) + '\n';
  return body;
}

CredentialStore CredentialStore::parse(std::string_view text) {
  if (text.empty() || text.back() != '\n') corrupt("missing final newline");
  const std::size_t trailer_start = text.rfind('\n', text.size() - 2);
  if (trailer_start == std::string_view::npos) corrupt("missing trailer");
  const std::string_view body = text.substr(0, trailer_start + 1);
  const std::string_view trailer = text.substr(trailer_start + 1, text.size() - trailer_start - 2);

  const auto tf = wire::split_fields(trailer);
  if (tf.size() != 3 || tf[0] != "end") corrupt("missing trailer");
  if (to_hex(core::sha256(as_bytes(body))) != tf[2]) corrupt("checksum mismatch");

  CredentialStore store;
  std::size_t records = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  try {
    while (pos < body.size()) {
      const std::size_t nl = body.find('\n', pos);
      const std::string_view line = body.substr(pos, nl - pos);
      pos = nl + 1;
      if (!header_seen) {
        if (line != kHeader) corrupt("unsupported header");
        header_seen = true;
        continue;
      }
      ++records;
      const auto f = wire::split_fields(line);
      if (f[0] == "user") {
        if (!store.add_user(wire::parse_user_line(line))) corrupt("duplicate user");
      } else if (f[0] == "browser") {
        auto [owner, entry] = wire::parse_browser_line(line);
        UserRecord* u = store.find_mut(owner);
        if (u == nullptr) corrupt("browser line before its user");
        for (const auto& b : u->browsers) {
          if (b.p_b == entry.p_b) corrupt("duplicate browser entry");
        }
        u->browsers.push_back(entry);
        store.index_add(entry.p_b);
      } else if (f[0] == "blacklist") {
        if (f.size() != 2) corrupt("malformed blacklist line");
        store.blacklist_.insert(wire::decode_identifier(f[1]));
      } else if (f[0] == "event") {
        if (f.size() != 5) corrupt("malformed event line");
        store.events_.push_back(PolicyEvent{event_kind_from_string(f[1]), wire::decode_text_field(f[2]),
                                            wire::decode_identifier(f[3]), wire::decode_counter(f[4])});
      } else if (f[0] == "pending") {
        if (f.size() != 4) corrupt("malformed pending line");
        store.pending_.push_back(
            PendingStepUp{wire::decode_text_field(f[1]), wire::decode_identifier(f[2]), wire::decode_counter(f[3])});
      } else {
        corrupt("unknown record type");
      }
    }
  } catch (const wire::RecordError& e) {
    corrupt(e.what());
  }
  if (!header_seen) corrupt("unsupported header");
  if (std::to_string(records) != tf[1]) corrupt("record count mismatch");
  return store;
}

void CredentialStore::persist(const std::filesystem::path& path) const {
  const std::string data = serialize();
  const std::filesystem::path tmp = path.string() + ".tmp." + std::to_string(::getpid());
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
  if (fd < 0) io_error("cannot create " + tmp.string());
  std::size_t written = 0;
  while (written < data.size()) {
    const ssize_t n = ::write(fd, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      ::unlink(tmp.c_str());
      io_error("cannot write " + tmp.string());
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    ::unlink(tmp.c_str());
    io_error("cannot sync " + tmp.string());
  }
  ::close(fd);
  if (::rename(tmp.c_str(), path.c_str()) != 0) {
    ::unlink(tmp.c_str());
    io_error("cannot replace " + path.string());
  }
}

CredentialStore CredentialStore::load(const std::filesystem::path& path) {
  if (path.empty()) return {};
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) return {};
    throw StoreError(StoreError::Kind::IoError, "cannot read " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.empty()) return {};
  return parse(text);
}

}  // namespace credfield::server
