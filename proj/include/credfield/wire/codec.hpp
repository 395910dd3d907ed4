#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "credfield/bytes.hpp"
#include "credfield/core/credential.hpp"

namespace credfield::wire {

inline constexpr std::uint8_t kWireVersion = 0x01;
inline constexpr std::size_t kCredentialSize = 203;
/// version, type, user-id length, challenge
inline constexpr std::size_t kMessageFixedSize = 36;
inline constexpr std::size_t kGrantSize = 40;
inline constexpr std::size_t kMaxUserIdBytes = 0xffff;

enum class DecodeErrc {
  BadLength,
  BadVersion,
  UnknownType,
  TruncatedChange,
  InvalidPoint,
  InvalidSignatureRange,
  InvalidUserId,
  MalformedJson,
};

std::string_view to_string(DecodeErrc code);

class DecodeError : public std::runtime_error {
 public:
  DecodeError(DecodeErrc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}
  DecodeErrc code() const noexcept { return code_; }

 private:
  DecodeErrc code_;
};

enum class MessageType : std::uint8_t {
  Enrol = 1,
  Verify = 2,
  Change = 3,
};

std::string_view to_string(MessageType type);

struct AuthMessage {
  std::uint8_t version = kWireVersion;
  MessageType type = MessageType::Verify;
  std::string user_id;
  core::Challenge challenge;
  core::Credential cred;
  /// Present iff type == Change.
  std::optional<core::Credential> cred_new;

  friend bool operator==(const AuthMessage&, const AuthMessage&) = default;
};

struct ChallengeGrant {
  core::Challenge challenge;
  std::uint64_t expires_at = 0;

  friend bool operator==(const ChallengeGrant&, const ChallengeGrant&) = default;
};

/// 0x01 || u64-BE time || sigma_p || sigma_b || v_p || v_b
std::array<std::uint8_t, kCredentialSize> encode_credential(const core::Credential& cred);
/// Throws DecodeError{BadLength | BadVersion | InvalidSignatureRange | InvalidPoint}.
core::Credential decode_credential(ByteView bytes);

/// Throws std::invalid_argument for an empty or oversized user id, or when
/// cred_new presence disagrees with the type.
Bytes encode_auth_message(const AuthMessage& msg);
/// Total: never crashes on arbitrary input, throws DecodeError instead.
AuthMessage decode_auth_message(ByteView bytes);

std::array<std::uint8_t, kGrantSize> encode_grant(const ChallengeGrant& grant);
ChallengeGrant decode_grant(ByteView bytes);

constexpr std::size_t auth_message_size(std::size_t user_id_bytes, MessageType type) {
  return kMessageFixedSize + user_id_bytes + kCredentialSize * (type == MessageType::Change ? 2 : 1);
}

}  // namespace credfield::wire
