#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "credfield/bytes.hpp"
#include "credfield/core/kdf.hpp"

namespace credfield::core {

inline constexpr std::size_t kScalarSize = 32;
inline constexpr std::size_t kPublicKeySize = 33;
inline constexpr std::size_t kSignatureSize = 64;

/// Big-endian secp256k1 group order n.
const std::array<std::uint8_t, kScalarSize>& curve_order();

/// Private scalar in [1, n-1]. Move-only; the bytes are wiped on destruction.
class SecretScalar {
 public:
  /// Throws CoreError{InvalidScalar} unless 1 <= value <= n-1.
  static SecretScalar from_bytes(ByteView big_endian);

  SecretScalar(const SecretScalar&) = delete;
  SecretScalar& operator=(const SecretScalar&) = delete;
  SecretScalar(SecretScalar&& other) noexcept;
  SecretScalar& operator=(SecretScalar&& other) noexcept;
  ~SecretScalar();

  /// Raw scalar bytes for signing and profile persistence only.
  std::span<const std::uint8_t, kScalarSize> reveal() const { return value_; }

  /// Deliberately uninformative.
  std::string debug_string() const { return "SecretScalar(<redacted>)"; }

 private:
  SecretScalar() = default;
  std::array<std::uint8_t, kScalarSize> value_{};
};

/// Curve point other than the identity, held in 33-byte compressed SEC1 form.
class PublicKey {
 public:
  /// Returns nullopt for wrong length, bad prefix, or an x with no curve point.
  static std::optional<PublicKey> from_compressed(ByteView encoded);
  static PublicKey from_secret(const SecretScalar& secret);

  const std::array<std::uint8_t, kPublicKeySize>& bytes() const { return encoded_; }

  friend bool operator==(const PublicKey&, const PublicKey&) = default;

 private:
  PublicKey() = default;
  std::array<std::uint8_t, kPublicKeySize> encoded_{};
};

/// ECDSA signature as two raw 32-byte integers. Range and low-s are checked
/// by in_range()/is_low_s(), not enforced at construction, so maulings can be
/// represented and rejected by verification.
struct Signature {
  std::array<std::uint8_t, 32> r{};
  std::array<std::uint8_t, 32> s{};

  static Signature from_compact(std::span<const std::uint8_t, kSignatureSize> compact);
  std::array<std::uint8_t, kSignatureSize> compact() const;

  /// 1 <= r, s <= n-1
  bool in_range() const;
  /// s <= n/2
  bool is_low_s() const;

  friend bool operator==(const Signature&, const Signature&) = default;
};

/// (r, n - s): the malleated twin of a signature.
Signature mirror_s(const Signature& sig);

/// ECDSA with RFC 6979 nonces (HMAC-SHA-256), low-s normalized.
Signature sign_deterministic(const SecretScalar& key, const Digest& digest);

/// Standard ECDSA verification that additionally rejects high-s and
/// out-of-range values instead of throwing.
bool verify_signature(const Digest& digest, const Signature& sig, const PublicKey& pub);

/// Fills the span with cryptographically secure bytes or throws
/// CoreError{EntropyFailure}.
using EntropySource = std::function<void(std::span<std::uint8_t>)>;
EntropySource system_entropy();

/// Uniform scalar by rejection sampling over 32-byte draws.
SecretScalar generate_browser_key(const EntropySource& entropy);

/// 1 + (int(dk) mod (n - 1)); dk is the 48-byte PBKDF2 output.
SecretScalar scalar_from_kdf_output(ByteView dk);

}  // namespace credfield::core
