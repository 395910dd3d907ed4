#include "credfield/wire/json.hpp"

#include <charconv>
#include <initializer_list>

namespace credfield::wire {

namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::string& what) { throw DecodeError(DecodeErrc::MalformedJson, what); }

void require_object(const json& j, std::initializer_list<std::string_view> allowed, const char* what) {
  if (!j.is_object()) malformed(std::string(what) + " must be an object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) malformed(std::string(what) + " has unexpected field '" + key + "'");
  }
}

const json& field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) malformed(std::string("missing field '") + name + "'");
  return *it;
}

std::string text_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_string()) malformed(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

Bytes b64_field(const json& j, const char* name, std::size_t size) {
  Bytes out;
  try {
    out = base64url_decode(text_field(j, name));
  } catch (const std::invalid_argument&) {
    malformed(std::string("field '") + name + "' is not base64url");
  }
  if (out.size() != size) {
    throw DecodeError(DecodeErrc::BadLength, std::string("field '") + name + "' must decode to " +
                                                 std::to_string(size) + " bytes");
  }
  return out;
}

std::uint8_t u8_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0 || v.get<std::int64_t>() > 0xff) {
    malformed(std::string("field '") + name + "' must be an integer in [0, 255]");
  }
  return static_cast<std::uint8_t>(v.get<std::int64_t>());
}

}  // namespace

std::string u64_to_decimal(std::uint64_t v) { return std::to_string(v); }

std::uint64_t u64_from_decimal(std::string_view text) {
  if (text.empty() || (text.size() > 1 && text[0] == '0')) malformed("not a canonical decimal: '" + std::string(text) + "'");
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    malformed("not a canonical decimal: '" + std::string(text) + "'");
  }
  return v;
}

json credential_to_json(const core::Credential& cred) {
  return json{
      {"browser_time", u64_to_decimal(cred.browser_time)},
      {"sigma_p", base64url_encode(cred.sigma_p.compact())},
      {"sigma_b", base64url_encode(cred.sigma_b.compact())},
      {"v_p", base64url_encode(cred.v_p.bytes())},
      {"v_b", base64url_encode(cred.v_b.bytes())},
  };
}

core::Credential credential_from_json(const json& j) {
  require_object(j, {"browser_time", "sigma_p", "sigma_b", "v_p", "v_b"}, "credential");
  // Reassemble the binary blob so both encodings share one validator.
  Bytes blob;
  blob.reserve(kCredentialSize);
  blob.push_back(kWireVersion);
  put_u64_be(blob, u64_from_decimal(text_field(j, "browser_time")));
  append(blob, b64_field(j, "sigma_p", core::kSignatureSize));
  append(blob, b64_field(j, "sigma_b", core::kSignatureSize));
  append(blob, b64_field(j, "v_p", core::kPublicKeySize));
  append(blob, b64_field(j, "v_b", core::kPublicKeySize));
  return decode_credential(blob);
}

json auth_message_to_json(const AuthMessage& msg) {
  json j{
      {"version", msg.version},
      {"type", static_cast<unsigned>(msg.type)},
      {"user_id", msg.user_id},
      {"challenge", base64url_encode(msg.challenge.nonce)},
      {"cred", credential_to_json(msg.cred)},
  };
  if (msg.cred_new) j["cred_new"] = credential_to_json(*msg.cred_new);
  return j;
}

AuthMessage auth_message_from_json(const json& j) {
  require_object(j, {"version", "type", "user_id", "challenge", "cred", "cred_new"}, "message");
  const std::uint8_t version = u8_field(j, "version");
  if (version != kWireVersion) throw DecodeError(DecodeErrc::BadVersion, "message version " + std::to_string(version));
  const std::uint8_t raw_type = u8_field(j, "type");
  if (raw_type < 1 || raw_type > 3) throw DecodeError(DecodeErrc::UnknownType, "message type " + std::to_string(raw_type));
  const auto type = static_cast<MessageType>(raw_type);

  std::string user_id = text_field(j, "user_id");
  if (user_id.empty() || user_id.size() > kMaxUserIdBytes) {
    throw DecodeError(DecodeErrc::InvalidUserId, "user id empty or longer than 65535 bytes");
  }
  core::Challenge challenge;
  const Bytes nonce = b64_field(j, "challenge", core::Challenge::kSize);
  std::copy(nonce.begin(), nonce.end(), challenge.nonce.begin());
  core::Credential cred = credential_from_json(field(j, "cred"));

  std::optional<core::Credential> cred_new;
  const bool has_new = j.contains("cred_new");
  if (type == MessageType::Change) {
    if (!has_new) throw DecodeError(DecodeErrc::TruncatedChange, "change message without cred_new");
    cred_new = credential_from_json(j["cred_new"]);
  } else if (has_new) {
    malformed("cred_new only allowed on change messages");
  }
  return AuthMessage{version, type, std::move(user_id), challenge, cred, cred_new};
}

AuthMessage auth_message_from_json_text(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) malformed("body is not valid JSON");
  return auth_message_from_json(j);
}

json grant_to_json(const ChallengeGrant& grant) {
  return json{{"challenge", base64url_encode(grant.challenge.nonce)},
              {"expires_at", u64_to_decimal(grant.expires_at)}};
}

ChallengeGrant grant_from_json(const json& j) {
  require_object(j, {"challenge", "expires_at"}, "challenge grant");
  ChallengeGrant g;
  const Bytes nonce = b64_field(j, "challenge", core::Challenge::kSize);
  std::copy(nonce.begin(), nonce.end(), g.challenge.nonce.begin());
  g.expires_at = u64_from_decimal(text_field(j, "expires_at"));
  return g;
}

}  // namespace credfield::wire
