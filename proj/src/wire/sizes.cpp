#include "credfield/wire/sizes.hpp"

#include "credfield/wire/codec.hpp"
#include "credfield/wire/records.hpp"

namespace credfield::wire {

SizeReport measure_sizes() {
  const core::KdfParams kdf;
  const auto origin = core::CanonicalOrigin::parse("https://bank.example");
  const std::string user(kReferenceUserIdLength, 'u');
  const std::uint64_t t = 1700000000;

  Bytes key_bytes(core::kScalarSize, 0);
  key_bytes.back() = 7;
  const auto browser_key = core::SecretScalar::from_bytes(key_bytes);
  const core::Challenge challenge{};
  const core::Credential cred =
      core::derive(user, challenge, SecretString("reference"), origin, t, browser_key, kdf);

  const AuthMessage msg{kWireVersion, MessageType::Verify, user, challenge, cred, std::nullopt};

  UserRecord record;
  record.user_id = user;
  record.p_p = core::store_password_identifier(user, cred.v_p, kdf);
  record.browsers.push_back(BrowserEntry{core::store_browser_identifier(cred.v_b, kdf), t, t, 1});
  record.created_at = t;
  record.updated_at = t;

  return SizeReport{encode_auth_message(msg).size(), format_user_record(record).size()};
}

}  // namespace credfield::wire
