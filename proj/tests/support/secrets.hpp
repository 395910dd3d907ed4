#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "credfield/core/credential.hpp"
#include "credfield/core/kdf.hpp"
#include "support/helpers.hpp"

namespace testsupport {

/// Byte patterns that must never leave a client or show up in output:
/// passwords, password scalars, raw PBKDF2 output and browser keys, each in
/// raw, hex and base64url form.
class SecretSet {
 public:
  void add_password(std::string_view password, const credfield::core::CanonicalOrigin& origin, std::string_view user_id,
                    const credfield::core::KdfParams& kdf = {}) {
    add_raw(credfield::as_bytes(password));
    const credfield::Bytes salt = credfield::core::build_salt(origin, user_id);
    const credfield::Bytes dk =
        credfield::core::pbkdf2_hmac_sha512(credfield::as_bytes(password), salt, kdf.iterations, 48);
    add_encoded(dk);
    const auto s_p = credfield::core::derive_password_scalar(credfield::SecretString(password), origin, user_id, kdf);
    add_encoded(s_p.reveal());
  }

  void add_key(const credfield::core::SecretScalar& key) { add_encoded(key.reveal()); }

  /// Label of a pattern found in `data`, or empty. Candidates are looked up
  /// by their first kMinLen bytes so large transcripts scan in linear time.
  std::string find_in(credfield::ByteView data) const {
    if (data.size() < kMinLen) return {};
    for (std::size_t i = 0; i + kMinLen <= data.size(); ++i) {
      const auto it = index_.find(prefix_key(data.subspan(i)));
      if (it == index_.end()) continue;
      for (const std::size_t idx : it->second) {
        const auto& p = patterns_[idx].bytes;
        if (p.size() <= data.size() - i && std::equal(p.begin(), p.end(), data.begin() + static_cast<std::ptrdiff_t>(i))) {
          return patterns_[idx].label;
        }
      }
    }
    return {};
  }
  std::string find_in(std::string_view text) const { return find_in(credfield::as_bytes(text)); }

  std::size_t size() const { return patterns_.size(); }

 private:
  static constexpr std::size_t kMinLen = 6;

  static std::uint64_t prefix_key(credfield::ByteView b) {
    std::uint64_t k = 0;
    for (std::size_t i = 0; i < kMinLen; ++i) k = (k << 8) | b[i];
    return k;
  }

  struct Pattern {
    credfield::Bytes bytes;
    std::string label;
  };

  void add_raw(credfield::ByteView b) {
    // Very short passwords would match by accident; the tests use longer ones.
    if (b.size() < kMinLen) return;
    index_[prefix_key(b)].push_back(patterns_.size());
    patterns_.push_back({credfield::Bytes(b.begin(), b.end()), "secret#" + std::to_string(patterns_.size())});
  }

  void add_encoded(credfield::ByteView b) {
    add_raw(b);
    const std::string hex = credfield::to_hex(b);
    add_raw(credfield::as_bytes(hex));
    std::string upper = hex;
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    add_raw(credfield::as_bytes(upper));
    const std::string b64 = credfield::base64url_encode(b);
    add_raw(credfield::as_bytes(b64));
  }

  std::vector<Pattern> patterns_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> index_;
};

}  // namespace testsupport
