#include "credfield/server/decision.hpp"

#include <array>
#include <stdexcept>

namespace credfield::server {

namespace {

constexpr std::array kAllCodes = {
    Code::Accept,           Code::Enrolled,        Code::PasswordChanged,      Code::StepUpRequired,
    Code::UnknownChallenge, Code::AlreadyConsumed, Code::ChallengeExpired,     Code::OriginMismatch,
    Code::UnknownUser,      Code::UserExists,      Code::Expired,              Code::FutureTimestamp,
    Code::UnknownPassword,  Code::BadPasswordSignature, Code::BadBrowserSignature, Code::BrowserMismatch,
    Code::BlacklistDenied,  Code::BadRequest,      Code::Internal,             Code::PasswordMismatch,
    Code::TransportError,
};

}  // namespace

std::string_view to_string(Code code) {
  switch (code) {
    case Code::Accept: return "Accept";
    case Code::Enrolled: return "Enrolled";
    case Code::PasswordChanged: return "PasswordChanged";
    case Code::StepUpRequired: return "StepUpRequired";
    case Code::UnknownChallenge: return "UnknownChallenge";
    case Code::AlreadyConsumed: return "AlreadyConsumed";
    case Code::ChallengeExpired: return "ChallengeExpired";
    case Code::OriginMismatch: return "OriginMismatch";
    case Code::UnknownUser: return "UnknownUser";
    case Code::UserExists: return "UserExists";
    case Code::Expired: return "Expired";
    case Code::FutureTimestamp: return "FutureTimestamp";
    case Code::UnknownPassword: return "UnknownPassword";
    case Code::BadPasswordSignature: return "BadPasswordSignature";
    case Code::BadBrowserSignature: return "BadBrowserSignature";
    case Code::BrowserMismatch: return "BrowserMismatch";
    case Code::BlacklistDenied: return "BlacklistDenied";
    case Code::BadRequest: return "BadRequest";
    case Code::Internal: return "Internal";
    case Code::PasswordMismatch: return "PasswordMismatch";
    case Code::TransportError: return "TransportError";
  }
  return "Internal";
}

std::optional<Code> code_from_string(std::string_view name) {
  for (Code c : kAllCodes) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

Code from_reject(core::VerifyReject reason) {
  switch (reason) {
    case core::VerifyReject::Expired: return Code::Expired;
    case core::VerifyReject::FutureTimestamp: return Code::FutureTimestamp;
    case core::VerifyReject::UnknownPassword: return Code::UnknownPassword;
    case core::VerifyReject::BadPasswordSignature: return Code::BadPasswordSignature;
    case core::VerifyReject::BadBrowserSignature: return Code::BadBrowserSignature;
  }
  return Code::Internal;
}

int http_status(Code code) {
  switch (code) {
    case Code::Accept:
    case Code::Enrolled:
    case Code::PasswordChanged: return 200;
    case Code::BadRequest: return 400;
    case Code::UserExists: return 409;
    case Code::StepUpRequired: return 428;
    case Code::Internal:
    case Code::TransportError: return 500;
    default: return 401;
  }
}

nlohmann::json decision_to_json(const Decision& d) {
  return nlohmann::json{{"code", to_string(d.code)}, {"detail", d.detail}, {"browser_known", d.browser_known}};
}

Decision decision_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("code") || !j["code"].is_string()) {
    throw std::invalid_argument("decision must be an object with a string code");
  }
  const auto code = code_from_string(j["code"].get<std::string>());
  if (!code) throw std::invalid_argument("unknown decision code");
  Decision d = Decision::of(*code);
  if (auto it = j.find("detail"); it != j.end() && it->is_string()) d.detail = it->get<std::string>();
  if (auto it = j.find("browser_known"); it != j.end() && it->is_boolean()) d.browser_known = it->get<bool>();
  return d;
}

}  // namespace credfield::server
