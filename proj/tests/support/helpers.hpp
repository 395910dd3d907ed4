#pragma once

#include <algorithm>
#include <random>
#include <string>
#include <string_view>

#include "credfield/bytes.hpp"
#include "credfield/core/credential.hpp"

namespace testsupport {

inline credfield::core::Challenge challenge_from_hex(std::string_view hex) {
  credfield::core::Challenge c;
  const auto b = credfield::from_hex(hex);
  std::copy(b.begin(), b.end(), c.nonce.begin());
  return c;
}

inline credfield::core::SecretScalar scalar_from_hex(std::string_view hex) {
  return credfield::core::SecretScalar::from_bytes(credfield::from_hex(hex));
}

inline credfield::core::SecretScalar scalar_from_int(unsigned v) {
  credfield::Bytes b(32, 0);
  b[28] = static_cast<std::uint8_t>(v >> 24);
  b[29] = static_cast<std::uint8_t>(v >> 16);
  b[30] = static_cast<std::uint8_t>(v >> 8);
  b[31] = static_cast<std::uint8_t>(v);
  return credfield::core::SecretScalar::from_bytes(b);
}

inline bool contains(credfield::ByteView haystack, credfield::ByteView needle) {
  if (needle.empty() || haystack.size() < needle.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

inline bool contains(std::string_view haystack, std::string_view needle) {
  return !needle.empty() && haystack.find(needle) != std::string_view::npos;
}

/// Seeded generator so property failures reproduce.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::string text(std::size_t min_len, std::size_t max_len, std::string_view alphabet) {
    std::uniform_int_distribution<std::size_t> len(min_len, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::string out(len(rng_), ' ');
    for (char& c : out) c = alphabet[pick(rng_)];
    return out;
  }

  std::string user() { return text(1, 16, "abcdefghijklmnopqrstuvwxyz0123456789._-@"); }
  std::string password() {
    return text(6, 24, "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789!@#$%^&*()-_ ");
  }
  std::string host() { return text(1, 12, "abcdefghijklmnopqrstuvwxyz0123456789-") + ".example"; }

  credfield::core::Challenge challenge() {
    credfield::core::Challenge c;
    for (auto& b : c.nonce) b = static_cast<std::uint8_t>(rng_());
    return c;
  }

  credfield::Bytes bytes(std::size_t n) {
    credfield::Bytes b(n);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng_());
    return b;
  }

  std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng_); }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testsupport
