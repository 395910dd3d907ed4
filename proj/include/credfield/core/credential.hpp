#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "credfield/bytes.hpp"
#include "credfield/core/kdf.hpp"
#include "credfield/core/origin.hpp"
#include "credfield/core/secp256k1.hpp"

namespace credfield::core {

/// Server-issued single-use nonce.
struct Challenge {
  static constexpr std::size_t kSize = 32;
  std::array<std::uint8_t, kSize> nonce{};

  friend bool operator==(const Challenge&, const Challenge&) = default;
};

/// Output of derive(): everything the browser puts on the wire.
struct Credential {
  Signature sigma_p;
  Signature sigma_b;
  PublicKey v_p;
  PublicKey v_b;
  std::uint64_t browser_time = 0;

  friend bool operator==(const Credential&, const Credential&) = default;
};

/// Opaque 64-byte server-side identifier (P_p or P_b).
class StoredIdentifier {
 public:
  static constexpr std::size_t kSize = 64;

  StoredIdentifier() = default;
  explicit StoredIdentifier(const std::array<std::uint8_t, kSize>& bytes) : bytes_(bytes) {}
  /// Throws std::invalid_argument on wrong length.
  static StoredIdentifier from_bytes(ByteView bytes);

  const std::array<std::uint8_t, kSize>& bytes() const { return bytes_; }

  friend bool operator==(const StoredIdentifier&, const StoredIdentifier&) = default;
  friend auto operator<=>(const StoredIdentifier&, const StoredIdentifier&) = default;

 private:
  std::array<std::uint8_t, kSize> bytes_{};
};

struct TimeWindow {
  std::uint64_t delta = 120;  // max credential age, seconds
  std::uint64_t skew = 30;    // max tolerated future drift, seconds
};

/// PBKDF2-HMAC-SHA512 over the password, salted with the origin and user id,
/// mapped onto [1, n-1]. Throws CoreError{EmptyPassword | EmptyUserId | FieldTooLong}.
SecretScalar derive_password_scalar(const SecretString& password, const CanonicalOrigin& origin,
                                    std::string_view user_id, const KdfParams& params);

/// V_p alone, for comparing two password entries without a challenge.
PublicKey password_public_key(const SecretString& password, const CanonicalOrigin& origin,
                              std::string_view user_id, const KdfParams& params);

/// SHA-256(0x01 || nonce)
Digest password_digest(const Challenge& challenge);
/// SHA-256(0x02 || sigma_p || u64-BE(browser_time))
Digest browser_digest(const Signature& sigma_p, std::uint64_t browser_time);

/// Browser-side credential derivation. The password scalar lives only for the
/// duration of the call.
Credential derive(std::string_view user_id, const Challenge& challenge, const SecretString& password,
                  const CanonicalOrigin& origin, std::uint64_t browser_time, const SecretScalar& browser_key,
                  const KdfParams& params);

/// P = PBKDF2-HMAC-SHA512(compressed v, salt). Empty salt is the browser case.
StoredIdentifier store_identifier(ByteView salt, const PublicKey& v, const KdfParams& params);

inline StoredIdentifier store_password_identifier(std::string_view user_id, const PublicKey& v_p,
                                                  const KdfParams& params) {
  return store_identifier(as_bytes(user_id), v_p, params);
}

inline StoredIdentifier store_browser_identifier(const PublicKey& v_b, const KdfParams& params) {
  return store_identifier({}, v_b, params);
}

enum class VerifyReject {
  Expired,
  FutureTimestamp,
  UnknownPassword,
  BadPasswordSignature,
  BadBrowserSignature,
};

std::string_view to_string(VerifyReject reason);

struct VerifyOutcome {
  bool accepted = false;
  std::optional<VerifyReject> reason;
  bool browser_known = false;
  /// P_b of the presented browser key, once computed.
  std::optional<StoredIdentifier> browser_id;

  static VerifyOutcome reject(VerifyReject why) { return VerifyOutcome{false, why, false, std::nullopt}; }
};

/// Checks, in order: credential age, future drift, password identifier,
/// password signature, browser signature. Browser membership does not reject;
/// it is reported through browser_known.
VerifyOutcome verify_credential_stateless(std::string_view user_id, const Challenge& challenge,
                                          std::uint64_t server_time, const Credential& cred,
                                          const StoredIdentifier& stored_p,
                                          std::span<const StoredIdentifier> stored_b_set,
                                          const TimeWindow& window, const KdfParams& params);

}  // namespace credfield::core
