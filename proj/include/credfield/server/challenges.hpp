#pragma once

#include <cstdint>
#include <map>
#include <mutex>

#include "credfield/core/credential.hpp"
#include "credfield/core/secp256k1.hpp"
#include "credfield/server/decision.hpp"
#include "credfield/wire/codec.hpp"

namespace credfield::server {

struct ChallengeRecord {
  core::Challenge nonce;
  core::CanonicalOrigin origin;
  std::uint64_t issued_at = 0;
  std::uint64_t ttl = 300;
  bool consumed = false;
};

/// In-memory single-use nonces. Thread-safe; redemption is a compare-and-set.
class ChallengeRegistry {
 public:
  explicit ChallengeRegistry(std::uint64_t ttl, core::EntropySource entropy = core::system_entropy());

  /// Throws CoreError{EntropyFailure}.
  wire::ChallengeGrant issue(const core::CanonicalOrigin& origin, std::uint64_t now);

  /// Accept on success, otherwise UnknownChallenge, AlreadyConsumed,
  /// ChallengeExpired or OriginMismatch. Only a redeemable record is consumed.
  Code redeem(const core::Challenge& nonce, const core::CanonicalOrigin& origin, std::uint64_t now);

  std::size_t size() const;

 private:
  void purge_locked(std::uint64_t now);

  std::uint64_t ttl_;
  core::EntropySource entropy_;
  mutable std::mutex mu_;
  std::map<std::array<std::uint8_t, core::Challenge::kSize>, ChallengeRecord> records_;
};

}  // namespace credfield::server
