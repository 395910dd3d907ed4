#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "credfield/wire/codec.hpp"

namespace credfield::wire {

// Bytes travel as unpadded base64url, u64 values as decimal strings, u8
// values as JSON numbers. Decoding applies the same validation as the
// binary codec and reports MalformedJson for shape errors.

nlohmann::json credential_to_json(const core::Credential& cred);
core::Credential credential_from_json(const nlohmann::json& j);

nlohmann::json auth_message_to_json(const AuthMessage& msg);
AuthMessage auth_message_from_json(const nlohmann::json& j);
/// Parses text first; syntax errors become DecodeError{MalformedJson}.
AuthMessage auth_message_from_json_text(std::string_view text);

nlohmann::json grant_to_json(const ChallengeGrant& grant);
ChallengeGrant grant_from_json(const nlohmann::json& j);

std::string u64_to_decimal(std::uint64_t v);
/// Canonical decimal only: no sign, no leading zeros, fits in 64 bits.
std::uint64_t u64_from_decimal(std::string_view text);

}  // namespace credfield::wire
