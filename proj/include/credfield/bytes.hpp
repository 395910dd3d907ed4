#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace credfield {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::string to_hex(ByteView data);
/// Throws std::invalid_argument on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

/// RFC 4648 section 5 alphabet, no padding.
std::string base64url_encode(ByteView data);
/// Accepts unpadded input only; throws std::invalid_argument otherwise.
Bytes base64url_decode(std::string_view text);

inline void append(Bytes& out, ByteView data) { out.insert(out.end(), data.begin(), data.end()); }

inline void put_u16_be(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_u64_be(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

inline std::uint16_t load_u16_be(ByteView b) {
  return static_cast<std::uint16_t>((b[0] << 8) | b[1]);
}

inline std::uint64_t load_u64_be(ByteView b) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | b[i];
  return v;
}

template <std::size_t N>
std::array<std::uint8_t, N> to_array(ByteView b) {
  std::array<std::uint8_t, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = b[i];
  return out;
}

/// Constant-time equality for equal-length buffers.
bool equal_ct(ByteView a, ByteView b);

/// Overwrites memory in a way the optimizer may not elide.
void secure_wipe(std::span<std::uint8_t> data);

/// Heap string for passwords: wiped on destruction, move-only, never printed.
class SecretString {
 public:
  SecretString() = default;
  /// Takes a copy and wipes the source buffer.
  explicit SecretString(std::string&& value);
  explicit SecretString(std::string_view value) : value_(value) {}
  explicit SecretString(const char* value) : value_(value) {}
  SecretString(const SecretString&) = delete;
  SecretString& operator=(const SecretString&) = delete;
  SecretString(SecretString&& other) noexcept;
  SecretString& operator=(SecretString&& other) noexcept;
  ~SecretString() { clear(); }

  bool empty() const { return value_.empty(); }
  std::size_t size() const { return value_.size(); }
  ByteView bytes() const { return as_bytes(value_); }
  void clear();

 private:
  std::string value_;
};

}  // namespace credfield
