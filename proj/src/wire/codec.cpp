#include "credfield/wire/codec.hpp"

#include <algorithm>

namespace credfield::wire {

namespace {

// Strict UTF-8: shortest form, no surrogates, nothing above U+10FFFF.
bool valid_utf8(ByteView s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const std::uint8_t c = s[i];
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xe0) == 0xc0) {
      extra = 1;
      cp = c & 0x1f;
    } else if ((c & 0xf0) == 0xe0) {
      extra = 2;
      cp = c & 0x0f;
    } else if ((c & 0xf8) == 0xf0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((s[i + k] & 0xc0) != 0x80) return false;
      cp = (cp << 6) | (s[i + k] & 0x3f);
    }
    static constexpr std::uint32_t kMin[] = {0, 0x80, 0x800, 0x10000};
    if (cp < kMin[extra] || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) return false;
    i += extra + 1;
  }
  return true;
}

core::Signature read_signature(ByteView b) {
  const auto sig = core::Signature::from_compact(b.first<core::kSignatureSize>());
  if (!sig.in_range()) throw DecodeError(DecodeErrc::InvalidSignatureRange, "r or s outside [1, n-1]");
  return sig;
}

core::PublicKey read_point(ByteView b, const char* field) {
  auto key = core::PublicKey::from_compressed(b);
  if (!key) throw DecodeError(DecodeErrc::InvalidPoint, std::string(field) + " is not a compressed curve point");
  return *key;
}

}  // namespace

std::string_view to_string(DecodeErrc code) {
  switch (code) {
    case DecodeErrc::BadLength: return "BadLength";
    case DecodeErrc::BadVersion: return "BadVersion";
    case DecodeErrc::UnknownType: return "UnknownType";
    case DecodeErrc::TruncatedChange: return "TruncatedChange";
    case DecodeErrc::InvalidPoint: return "InvalidPoint";
    case DecodeErrc::InvalidSignatureRange: return "InvalidSignatureRange";
    case DecodeErrc::InvalidUserId: return "InvalidUserId";
    case DecodeErrc::MalformedJson: return "MalformedJson";
  }
  return "Unknown";
}

std::string_view to_string(MessageType type) {
  switch (type) {
    case MessageType::Enrol: return "enrol";
    case MessageType::Verify: return "verify";
    case MessageType::Change: return "change";
  }
  return "unknown";
}

std::array<std::uint8_t, kCredentialSize> encode_credential(const core::Credential& cred) {
  Bytes out;
  out.reserve(kCredentialSize);
  out.push_back(kWireVersion);
  put_u64_be(out, cred.browser_time);
  append(out, cred.sigma_p.compact());
  append(out, cred.sigma_b.compact());
  append(out, cred.v_p.bytes());
  append(out, cred.v_b.bytes());
  return to_array<kCredentialSize>(out);
}

core::Credential decode_credential(ByteView b) {
  if (b.size() != kCredentialSize) {
    throw DecodeError(DecodeErrc::BadLength, "credential must be 203 bytes, got " + std::to_string(b.size()));
  }
  if (b[0] != kWireVersion) throw DecodeError(DecodeErrc::BadVersion, "credential version " + std::to_string(b[0]));
  const std::uint64_t time = load_u64_be(b.subspan(1, 8));
  core::PublicKey v_p = read_point(b.subspan(137, core::kPublicKeySize), "v_p");
  core::PublicKey v_b = read_point(b.subspan(170, core::kPublicKeySize), "v_b");
  core::Signature sigma_p = read_signature(b.subspan(9, core::kSignatureSize));
  core::Signature sigma_b = read_signature(b.subspan(73, core::kSignatureSize));
  return core::Credential{sigma_p, sigma_b, v_p, v_b, time};
}

Bytes encode_auth_message(const AuthMessage& msg) {
  if (msg.user_id.empty()) throw std::invalid_argument("user id must not be empty");
  if (msg.user_id.size() > kMaxUserIdBytes) throw std::invalid_argument("user id longer than 65535 bytes");
  if (msg.cred_new.has_value() != (msg.type == MessageType::Change)) {
    throw std::invalid_argument("cred_new must be present exactly for change messages");
  }
  Bytes out;
  out.reserve(auth_message_size(msg.user_id.size(), msg.type));
  out.push_back(msg.version);
  out.push_back(static_cast<std::uint8_t>(msg.type));
  put_u16_be(out, static_cast<std::uint16_t>(msg.user_id.size()));
  append(out, as_bytes(msg.user_id));
  append(out, msg.challenge.nonce);
  append(out, encode_credential(msg.cred));
  if (msg.cred_new) append(out, encode_credential(*msg.cred_new));
  return out;
}

AuthMessage decode_auth_message(ByteView b) {
  if (b.size() < kMessageFixedSize) throw DecodeError(DecodeErrc::BadLength, "message shorter than header");
  if (b[0] != kWireVersion) throw DecodeError(DecodeErrc::BadVersion, "message version " + std::to_string(b[0]));
  if (b[1] < 1 || b[1] > 3) throw DecodeError(DecodeErrc::UnknownType, "message type " + std::to_string(b[1]));

  const auto type = static_cast<MessageType>(b[1]);
  const std::size_t user_len = load_u16_be(b.subspan(2, 2));
  const std::size_t one = auth_message_size(user_len, MessageType::Verify);
  const std::size_t expected = auth_message_size(user_len, type);
  if (type == MessageType::Change && b.size() >= one && b.size() < expected) {
    throw DecodeError(DecodeErrc::TruncatedChange, "second credential truncated");
  }
  if (b.size() != expected) {
    throw DecodeError(DecodeErrc::BadLength,
                      "expected " + std::to_string(expected) + " bytes, got " + std::to_string(b.size()));
  }
  const ByteView user = b.subspan(4, user_len);
  if (user_len == 0 || !valid_utf8(user)) throw DecodeError(DecodeErrc::InvalidUserId, "user id empty or not UTF-8");

  std::size_t at = 4 + user_len;
  core::Challenge challenge;
  std::copy_n(b.begin() + static_cast<std::ptrdiff_t>(at), core::Challenge::kSize, challenge.nonce.begin());
  at += core::Challenge::kSize;
  core::Credential cred = decode_credential(b.subspan(at, kCredentialSize));
  at += kCredentialSize;
  std::optional<core::Credential> cred_new;
  if (type == MessageType::Change) cred_new = decode_credential(b.subspan(at, kCredentialSize));
  return AuthMessage{b[0], type, std::string(user.begin(), user.end()), challenge, cred, cred_new};
}

std::array<std::uint8_t, kGrantSize> encode_grant(const ChallengeGrant& grant) {
  Bytes out;
  out.reserve(kGrantSize);
  append(out, grant.challenge.nonce);
  put_u64_be(out, grant.expires_at);
  return to_array<kGrantSize>(out);
}

ChallengeGrant decode_grant(ByteView b) {
  if (b.size() != kGrantSize) throw DecodeError(DecodeErrc::BadLength, "challenge grant must be 40 bytes");
  ChallengeGrant g;
  std::copy_n(b.begin(), core::Challenge::kSize, g.challenge.nonce.begin());
  g.expires_at = load_u64_be(b.subspan(core::Challenge::kSize, 8));
  return g;
}

}  // namespace credfield::wire
