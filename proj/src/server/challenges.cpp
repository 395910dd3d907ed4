#include "credfield/server/challenges.hpp"

#include "credfield/core/error.hpp"

namespace credfield::server {

namespace {
// Expired records linger this long so late redemptions still report
// ChallengeExpired rather than UnknownChallenge.
constexpr std::uint64_t kGraceSeconds = 3600;
}  // namespace

ChallengeRegistry::ChallengeRegistry(std::uint64_t ttl, core::EntropySource entropy)
    : ttl_(ttl), entropy_(std::move(entropy)) {}

wire::ChallengeGrant ChallengeRegistry::issue(const core::CanonicalOrigin& origin, std::uint64_t now) {
  if (!entropy_) throw core::CoreError(core::Errc::EntropyFailure, "no entropy source");
  std::lock_guard lock(mu_);
  purge_locked(now);
  core::Challenge c;
  // A repeat is astronomically unlikely; a broken source must not hand out a nonce twice.
  for (int attempt = 0;; ++attempt) {
    entropy_(c.nonce);
    if (!records_.contains(c.nonce)) break;
    if (attempt == 8) throw core::CoreError(core::Errc::EntropyFailure, "entropy source repeats nonces");
  }
  records_.emplace(c.nonce, ChallengeRecord{c, origin, now, ttl_, false});
  return wire::ChallengeGrant{c, now + ttl_};
}

Code ChallengeRegistry::redeem(const core::Challenge& nonce, const core::CanonicalOrigin& origin, std::uint64_t now) {
  std::lock_guard lock(mu_);
  auto it = records_.find(nonce.nonce);
  if (it == records_.end()) return Code::UnknownChallenge;
  ChallengeRecord& r = it->second;
  if (r.consumed) return Code::AlreadyConsumed;
  if (now > r.issued_at + r.ttl) return Code::ChallengeExpired;
  if (!(r.origin == origin)) return Code::OriginMismatch;
  r.consumed = true;
  return Code::Accept;
}

std::size_t ChallengeRegistry::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

void ChallengeRegistry::purge_locked(std::uint64_t now) {
  std::erase_if(records_, [&](const auto& kv) { return now > kv.second.issued_at + kv.second.ttl + kGraceSeconds; });
}

}  // namespace credfield::server
