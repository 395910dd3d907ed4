#include "credfield/core/credential.hpp"

#include <algorithm>
#include <stdexcept>

#include "credfield/core/error.hpp"

namespace credfield::core {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::MalformedUrl: return "MalformedUrl";
    case Errc::UnsupportedScheme: return "UnsupportedScheme";
    case Errc::EmptyUserId: return "EmptyUserId";
    case Errc::FieldTooLong: return "FieldTooLong";
    case Errc::EmptyPassword: return "EmptyPassword";
    case Errc::EntropyFailure: return "EntropyFailure";
    case Errc::InvalidScalar: return "InvalidScalar";
    case Errc::CryptoFailure: return "CryptoFailure";
  }
  return "Unknown";
}

std::string_view to_string(VerifyReject reason) {
  switch (reason) {
    case VerifyReject::Expired: return "Expired";
    case VerifyReject::FutureTimestamp: return "FutureTimestamp";
    case VerifyReject::UnknownPassword: return "UnknownPassword";
    case VerifyReject::BadPasswordSignature: return "BadPasswordSignature";
    case VerifyReject::BadBrowserSignature: return "BadBrowserSignature";
  }
  return "Unknown";
}

StoredIdentifier StoredIdentifier::from_bytes(ByteView bytes) {
  if (bytes.size() != kSize) throw std::invalid_argument("stored identifier must be 64 bytes");
  return StoredIdentifier(to_array<kSize>(bytes));
}

SecretScalar derive_password_scalar(const SecretString& password, const CanonicalOrigin& origin,
                                    std::string_view user_id, const KdfParams& params) {
  if (password.empty()) throw CoreError(Errc::EmptyPassword, "password must not be empty");
  const Bytes salt = build_salt(origin, user_id);
  Bytes dk = pbkdf2_hmac_sha512(password.bytes(), salt, params.iterations, KdfParams::kScalarBytes);
  SecretScalar scalar = scalar_from_kdf_output(dk);
  secure_wipe(dk);
  return scalar;
}

PublicKey password_public_key(const SecretString& password, const CanonicalOrigin& origin,
                              std::string_view user_id, const KdfParams& params) {
  return PublicKey::from_secret(derive_password_scalar(password, origin, user_id, params));
}

Digest password_digest(const Challenge& challenge) {
  Bytes msg;
  msg.reserve(1 + Challenge::kSize);
  msg.push_back(0x01);
  append(msg, challenge.nonce);
  return sha256(msg);
}

Digest browser_digest(const Signature& sigma_p, std::uint64_t browser_time) {
  Bytes msg;
  msg.reserve(1 + kSignatureSize + 8);
  msg.push_back(0x02);
  append(msg, sigma_p.compact());
  put_u64_be(msg, browser_time);
  return sha256(msg);
}

Credential derive(std::string_view user_id, const Challenge& challenge, const SecretString& password,
                  const CanonicalOrigin& origin, std::uint64_t browser_time, const SecretScalar& browser_key,
                  const KdfParams& params) {
  Signature sigma_p;
  std::optional<PublicKey> v_p;
  {
    const SecretScalar s_p = derive_password_scalar(password, origin, user_id, params);
    sigma_p = sign_deterministic(s_p, password_digest(challenge));
    v_p = PublicKey::from_secret(s_p);
  }  // s_p wiped here
  const Signature sigma_b = sign_deterministic(browser_key, browser_digest(sigma_p, browser_time));
  return Credential{sigma_p, sigma_b, *v_p, PublicKey::from_secret(browser_key), browser_time};
}

StoredIdentifier store_identifier(ByteView salt, const PublicKey& v, const KdfParams& params) {
  const Bytes p = pbkdf2_hmac_sha512(v.bytes(), salt, params.iterations, KdfParams::kStoreBytes);
  return StoredIdentifier::from_bytes(p);
}

VerifyOutcome verify_credential_stateless(std::string_view user_id, const Challenge& challenge,
                                          std::uint64_t server_time, const Credential& cred,
                                          const StoredIdentifier& stored_p,
                                          std::span<const StoredIdentifier> stored_b_set,
                                          const TimeWindow& window, const KdfParams& params) {
  if (server_time > cred.browser_time && server_time - cred.browser_time > window.delta) {
    return VerifyOutcome::reject(VerifyReject::Expired);
  }
  if (cred.browser_time > server_time && cred.browser_time - server_time > window.skew) {
    return VerifyOutcome::reject(VerifyReject::FutureTimestamp);
  }
  const StoredIdentifier presented_p = store_password_identifier(user_id, cred.v_p, params);
  if (!equal_ct(presented_p.bytes(), stored_p.bytes())) return VerifyOutcome::reject(VerifyReject::UnknownPassword);

  const StoredIdentifier presented_b = store_browser_identifier(cred.v_b, params);
  const bool known = std::any_of(stored_b_set.begin(), stored_b_set.end(),
                                 [&](const StoredIdentifier& id) { return id == presented_b; });

  if (!verify_signature(password_digest(challenge), cred.sigma_p, cred.v_p)) {
    return VerifyOutcome::reject(VerifyReject::BadPasswordSignature);
  }
  if (!verify_signature(browser_digest(cred.sigma_p, cred.browser_time), cred.sigma_b, cred.v_b)) {
    return VerifyOutcome::reject(VerifyReject::BadBrowserSignature);
  }
  return VerifyOutcome{true, std::nullopt, known, presented_b};
}

}  // namespace credfield::core
