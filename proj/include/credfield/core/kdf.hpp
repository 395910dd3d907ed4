#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "credfield/bytes.hpp"
#include "credfield/core/origin.hpp"

namespace credfield::core {

using Digest = std::array<std::uint8_t, 32>;

/// PBKDF2 configuration. The PRF is fixed to HMAC-SHA-512.
struct KdfParams {
  static constexpr std::size_t kScalarBytes = 48;
  static constexpr std::size_t kStoreBytes = 64;
  static constexpr std::uint32_t kProductionMinimum = 1000;

  std::uint32_t iterations = 1000;

  friend bool operator==(const KdfParams&, const KdfParams&) = default;
};

Digest sha256(ByteView data);
Bytes hmac_sha256(ByteView key, ByteView data);
Bytes pbkdf2_hmac_sha512(ByteView secret, ByteView salt, std::uint32_t iterations, std::size_t length);

/// u16-BE(len(origin)) || origin || u16-BE(len(user_id)) || user_id
/// Throws CoreError{EmptyUserId | FieldTooLong}.
Bytes build_salt(const CanonicalOrigin& origin, std::string_view user_id);

}  // namespace credfield::core
