#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "credfield/core/credential.hpp"

namespace credfield::wire {

struct BrowserEntry {
  core::StoredIdentifier p_b;
  std::uint64_t first_seen = 0;
  std::uint64_t last_seen = 0;
  std::uint64_t login_count = 0;

  friend bool operator==(const BrowserEntry&, const BrowserEntry&) = default;
};

struct UserRecord {
  std::string user_id;
  core::StoredIdentifier p_p;
  /// Registration order; eviction picks by last_seen, not position.
  std::vector<BrowserEntry> browsers;
  std::uint64_t created_at = 0;
  std::uint64_t updated_at = 0;

  friend bool operator==(const UserRecord&, const UserRecord&) = default;
};

class RecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Store lines are space-separated fields; text values are base64url so
// they never contain separators.
//   user <b64 user_id> <b64 p_p> <created_at> <updated_at>
//   browser <b64 user_id> <b64 p_b> <first_seen> <last_seen> <login_count>

std::vector<std::string_view> split_fields(std::string_view line);

std::string format_user_line(const UserRecord& user);
std::string format_browser_line(std::string_view user_id, const BrowserEntry& entry);
/// The user line followed by one browser line per entry, each ending in '\n'.
std::string format_user_record(const UserRecord& user);

/// Throws RecordError. The returned record has no browsers.
UserRecord parse_user_line(std::string_view line);
std::pair<std::string, BrowserEntry> parse_browser_line(std::string_view line);

std::string encode_text_field(std::string_view text);
std::string decode_text_field(std::string_view field);
std::string encode_identifier(const core::StoredIdentifier& id);
core::StoredIdentifier decode_identifier(std::string_view field);
std::uint64_t decode_counter(std::string_view field);

}  // namespace credfield::wire
