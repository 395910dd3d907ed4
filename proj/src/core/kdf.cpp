#include "credfield/core/kdf.hpp"

#include <limits>

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include "credfield/core/error.hpp"

namespace credfield::core {

Digest sha256(ByteView data) {
  Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != out.size()) {
    throw CoreError(Errc::CryptoFailure, "SHA-256 failed");
  }
  return out;
}

Bytes hmac_sha256(ByteView key, ByteView data) {
  Bytes out(32);
  unsigned int len = 0;
  if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), data.data(), data.size(), out.data(),
           &len) == nullptr ||
      len != out.size()) {
    throw CoreError(Errc::CryptoFailure, "HMAC-SHA-256 failed");
  }
  return out;
}

Bytes pbkdf2_hmac_sha512(ByteView secret, ByteView salt, std::uint32_t iterations, std::size_t length) {
  if (iterations == 0 || iterations > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
    throw CoreError(Errc::CryptoFailure, "PBKDF2 iteration count out of range");
  }
  Bytes out(length);
  // OpenSSL treats a null password pointer as "use strlen"; an empty secret
  // needs a valid pointer instead.
  static const char kEmpty = '\0';
  const char* pass = secret.empty() ? &kEmpty : reinterpret_cast<const char*>(secret.data());
  static const unsigned char kEmptySalt = 0;
  const unsigned char* salt_ptr = salt.empty() ? &kEmptySalt : salt.data();
  if (PKCS5_PBKDF2_HMAC(pass, static_cast<int>(secret.size()), salt_ptr, static_cast<int>(salt.size()),
                        static_cast<int>(iterations), EVP_sha512(), static_cast<int>(length),
                        out.data()) != 1) {
    throw CoreError(Errc::CryptoFailure, "PBKDF2 failed");
  }
  return out;
}

Bytes build_salt(const CanonicalOrigin& origin, std::string_view user_id) {
  if (user_id.empty()) throw CoreError(Errc::EmptyUserId, "user id must not be empty");
  const std::string origin_text = origin.serialize();
  constexpr std::size_t kMax = std::numeric_limits<std::uint16_t>::max();
  if (origin_text.size() > kMax || user_id.size() > kMax) {
    throw CoreError(Errc::FieldTooLong, "salt field exceeds 65535 bytes");
  }
  Bytes salt;
  salt.reserve(4 + origin_text.size() + user_id.size());
  put_u16_be(salt, static_cast<std::uint16_t>(origin_text.size()));
  append(salt, as_bytes(origin_text));
  put_u16_be(salt, static_cast<std::uint16_t>(user_id.size()));
  append(salt, as_bytes(user_id));
  return salt;
}

}  // namespace credfield::core
