#include "credfield/wire/records.hpp"

#include "credfield/wire/json.hpp"

namespace credfield::wire {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t sp = line.find(' ', start);
    out.push_back(line.substr(start, sp == std::string_view::npos ? std::string_view::npos : sp - start));
    if (sp == std::string_view::npos) break;
    start = sp + 1;
  }
  return out;
}

std::string encode_text_field(std::string_view text) { return base64url_encode(as_bytes(text)); }

std::string decode_text_field(std::string_view field) {
  try {
    const Bytes raw = base64url_decode(field);
    return std::string(raw.begin(), raw.end());
  } catch (const std::invalid_argument&) {
    throw RecordError("bad base64url text field");
  }
}

std::string encode_identifier(const core::StoredIdentifier& id) { return base64url_encode(id.bytes()); }

core::StoredIdentifier decode_identifier(std::string_view field) {
  Bytes raw;
  try {
    raw = base64url_decode(field);
  } catch (const std::invalid_argument&) {
    throw RecordError("bad base64url identifier");
  }
  if (raw.size() != core::StoredIdentifier::kSize) throw RecordError("identifier must be 64 bytes");
  return core::StoredIdentifier::from_bytes(raw);
}

std::uint64_t decode_counter(std::string_view field) {
  try {
    return u64_from_decimal(field);
  } catch (const DecodeError&) {
    throw RecordError("bad decimal field");
  }
}

std::string format_user_line(const UserRecord& user) {
  return "user " + encode_text_field(user.user_id) + ' ' + encode_identifier(user.p_p) + ' ' +
         u64_to_decimal(user.created_at) + ' ' + u64_to_decimal(user.updated_at);
}

std::string format_browser_line(std::string_view user_id, const BrowserEntry& entry) {
  return "browser " + encode_text_field(user_id) + ' ' + encode_identifier(entry.p_b) + ' ' +
         u64_to_decimal(entry.first_seen) + ' ' + u64_to_decimal(entry.last_seen) + ' ' +
         u64_to_decimal(entry.login_count);
}

std::string format_user_record(const UserRecord& user) {
  std::string out = format_user_line(user) + '\n';
  for (const auto& b : user.browsers) out += format_browser_line(user.user_id, b) + '\n';
  return out;
}

UserRecord parse_user_line(std::string_view line) {
  const auto f = split_fields(line);
  if (f.size() != 5 || f[0] != "user") throw RecordError("malformed user line");
  UserRecord u;
  u.user_id = decode_text_field(f[1]);
  if (u.user_id.empty()) throw RecordError("empty user id");
  u.p_p = decode_identifier(f[2]);
  u.created_at = decode_counter(f[3]);
  u.updated_at = decode_counter(f[4]);
  if (u.updated_at < u.created_at) throw RecordError("updated_at before created_at");
  return u;
}

std::pair<std::string, BrowserEntry> parse_browser_line(std::string_view line) {
  const auto f = split_fields(line);
  if (f.size() != 6 || f[0] != "browser") throw RecordError("malformed browser line");
  BrowserEntry e;
  std::string user = decode_text_field(f[1]);
  e.p_b = decode_identifier(f[2]);
  e.first_seen = decode_counter(f[3]);
  e.last_seen = decode_counter(f[4]);
  e.login_count = decode_counter(f[5]);
  if (e.last_seen < e.first_seen) throw RecordError("last_seen before first_seen");
  return {std::move(user), e};
}

}  // namespace credfield::wire
