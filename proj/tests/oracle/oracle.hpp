// Test-only reference implementations. Shares no code with the library:
// hashes, HMAC and PBKDF2 are written out from FIPS 180-4 / RFC 2104 /
// RFC 8018, and curve arithmetic uses Boost cpp_int in affine coordinates.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using Bytes = std::vector<std::uint8_t>;
using Int = boost::multiprecision::cpp_int;

Bytes sha256(const Bytes& data);
Bytes sha512(const Bytes& data);
Bytes hmac_sha256(const Bytes& key, const Bytes& data);
Bytes hmac_sha512(const Bytes& key, const Bytes& data);
Bytes pbkdf2_sha512(const Bytes& password, const Bytes& salt, std::uint32_t iterations, std::size_t length);

const Int& curve_order();
Int from_be(const Bytes& b);
Bytes to_be(const Int& v, std::size_t width);

struct Point {
  Int x;
  Int y;
  bool infinity = false;
};
Point scalar_base_mul(const Int& k);
Bytes compress(const Point& p);
/// Decompresses a SEC1 33-byte point; returns false when x has no square root.
bool decompress(const Bytes& enc, Point& out);
bool x_on_curve(const Int& x);

/// RFC 6979 nonce for a 32-byte digest, HMAC-SHA256 instantiation.
Int rfc6979_nonce(const Int& key, const Bytes& digest);
/// Low-s normalized compact r||s.
Bytes ecdsa_sign(const Int& key, const Bytes& digest);
bool ecdsa_verify(const Bytes& digest, const Bytes& compact, const Point& pub);

Bytes build_salt(std::string_view origin, std::string_view user_id);
Int password_scalar(std::string_view password, std::string_view origin, std::string_view user_id,
                    std::uint32_t iterations);
Bytes derive_blob(std::string_view user_id, const Bytes& challenge, std::string_view password,
                  std::string_view origin, std::uint64_t browser_time, const Int& browser_key,
                  std::uint32_t iterations);
Bytes store_identifier(const Bytes& salt, const Bytes& compressed_point, std::uint32_t iterations);

Bytes from_hex(std::string_view hex);
std::string to_hex(const Bytes& b);
Bytes bytes_of(std::string_view s);

}  // namespace oracle
