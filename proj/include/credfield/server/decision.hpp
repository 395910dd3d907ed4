#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "credfield/core/credential.hpp"

namespace credfield::server {

/// Every outcome a flow can report, server- or client-side.
enum class Code {
  Accept,
  Enrolled,
  PasswordChanged,
  StepUpRequired,
  // challenge bookkeeping
  UnknownChallenge,
  AlreadyConsumed,
  ChallengeExpired,
  OriginMismatch,
  // accounts
  UnknownUser,
  UserExists,
  // credential checks
  Expired,
  FutureTimestamp,
  UnknownPassword,
  BadPasswordSignature,
  BadBrowserSignature,
  BrowserMismatch,
  BlacklistDenied,
  // request handling
  BadRequest,
  Internal,
  // client-side only
  PasswordMismatch,
  TransportError,
};

std::string_view to_string(Code code);
std::optional<Code> code_from_string(std::string_view name);
Code from_reject(core::VerifyReject reason);

/// 200 success, 400 BadRequest, 409 UserExists, 428 StepUpRequired,
/// 500 Internal/TransportError, 401 for every other rejection.
int http_status(Code code);

struct Decision {
  Code code = Code::Internal;
  /// Human-readable; never carries secrets.
  std::string detail;
  bool browser_known = false;
  /// P_b of the presenting browser when it was computed. In-process only.
  std::optional<core::StoredIdentifier> browser_id;

  bool ok() const { return code == Code::Accept || code == Code::Enrolled || code == Code::PasswordChanged; }

  static Decision of(Code code, std::string detail = {}) { return Decision{code, std::move(detail), false, std::nullopt}; }
};

/// {"code", "detail", "browser_known"}; browser_id is not exported.
nlohmann::json decision_to_json(const Decision& d);
/// Throws std::invalid_argument on shape errors or unknown codes.
Decision decision_from_json(const nlohmann::json& j);

}  // namespace credfield::server
