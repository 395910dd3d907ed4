#include <catch_amalgamated.hpp>

#include "credfield/core/error.hpp"
#include "credfield/wire/codec.hpp"
#include "credfield/wire/json.hpp"
#include "credfield/wire/records.hpp"
#include "credfield/wire/sizes.hpp"
#include "oracle.hpp"
#include "support/helpers.hpp"
#include "support/vectors.hpp"

using namespace credfield;
using namespace credfield::wire;
using core::Credential;
using testsupport::Gen;

namespace {

DecodeErrc errc_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const DecodeError& e) {
    return e.code();
  }
  FAIL("expected DecodeError");
  return DecodeErrc::MalformedJson;
}

core::PublicKey random_point(Gen& g) {
  for (;;) {
    const Bytes b = g.bytes(32);
    try {
      return core::PublicKey::from_secret(core::SecretScalar::from_bytes(b));
    } catch (const core::CoreError&) {
    }
  }
}

core::Signature random_signature(Gen& g) {
  for (;;) {
    const Bytes b = g.bytes(64);
    const auto sig = core::Signature::from_compact(std::span<const std::uint8_t, 64>(b.data(), 64));
    if (sig.in_range()) return sig;
  }
}

Credential random_credential(Gen& g) {
  return Credential{random_signature(g), random_signature(g), random_point(g), random_point(g), g.engine()()};
}

std::string random_user(Gen& g) {
  static const std::string_view pieces[] = {"a", "Z", "0", ".", "@", "\xc3\xa9", "\xe6\x97\xa5", "\xf0\x9f\x94\x91"};
  std::string out;
  const std::size_t n = 1 + g.below(40);
  for (std::size_t i = 0; i < n; ++i) out += pieces[g.below(std::size(pieces))];
  return out;
}

AuthMessage random_message(Gen& g) {
  const auto type = static_cast<MessageType>(1 + g.below(3));
  std::optional<Credential> second;
  if (type == MessageType::Change) second = random_credential(g);
  return AuthMessage{kWireVersion, type, random_user(g), g.challenge(), random_credential(g), second};
}

const Credential& fixed_credential() {
  static const Credential cred = [] {
    const auto& v = testsupport::vectors()["derive"][0];
    return core::derive(v["user_id"].get<std::string>(), testsupport::challenge_from_hex(v["challenge"].get<std::string>()),
                        SecretString(v["password"].get<std::string>()),
                        core::CanonicalOrigin::parse(v["origin"].get<std::string>()),
                        v["browser_time"].get<std::uint64_t>(),
                        testsupport::scalar_from_hex(v["browser_key"].get<std::string>()), core::KdfParams{});
  }();
  return cred;
}

}  // namespace

TEST_CASE("credential blob of the fixed vector matches the frozen bytes", "[wire][credential]") {
  for (const auto& v : testsupport::vectors()["derive"]) {
    const Bytes frozen = from_hex(v["credential"].get<std::string>());
    REQUIRE(frozen.size() == kCredentialSize);
    const Credential decoded = decode_credential(frozen);
    CHECK(to_hex(encode_credential(decoded)) == to_hex(frozen));
    CHECK(decoded.browser_time == v["browser_time"].get<std::uint64_t>());
  }
  const auto blob = encode_credential(fixed_credential());
  CHECK(to_hex(blob) == testsupport::vectors()["derive"][0]["credential"].get<std::string>());
  CHECK(decode_credential(blob) == fixed_credential());
}

TEST_CASE("decode_credential rejects malformed blobs", "[wire][credential]") {
  const auto good = encode_credential(fixed_credential());
  Bytes b(good.begin(), good.end());

  CHECK(errc_of([&] { decode_credential(ByteView(b).first(202)); }) == DecodeErrc::BadLength);
  Bytes longer = b;
  longer.push_back(0);
  CHECK(errc_of([&] { decode_credential(longer); }) == DecodeErrc::BadLength);
  CHECK(errc_of([&] { decode_credential({}); }) == DecodeErrc::BadLength);

  Bytes bad_version = b;
  bad_version[0] = 0x02;
  CHECK(errc_of([&] { decode_credential(bad_version); }) == DecodeErrc::BadVersion);

  // Smallest x with no curve point, found with the independent oracle.
  oracle::Int x = 1;
  while (oracle::x_on_curve(x)) ++x;
  Bytes off_curve = oracle::to_be(x, 33);
  off_curve[0] = 0x02;
  Bytes bad_vp = b;
  std::copy(off_curve.begin(), off_curve.end(), bad_vp.begin() + 137);
  CHECK(errc_of([&] { decode_credential(bad_vp); }) == DecodeErrc::InvalidPoint);
  Bytes bad_vb = b;
  std::copy(off_curve.begin(), off_curve.end(), bad_vb.begin() + 170);
  CHECK(errc_of([&] { decode_credential(bad_vb); }) == DecodeErrc::InvalidPoint);
  Bytes bad_prefix = b;
  bad_prefix[137] = 0x04;
  CHECK(errc_of([&] { decode_credential(bad_prefix); }) == DecodeErrc::InvalidPoint);

  Bytes zero_r = b;
  std::fill(zero_r.begin() + 9, zero_r.begin() + 41, 0);
  CHECK(errc_of([&] { decode_credential(zero_r); }) == DecodeErrc::InvalidSignatureRange);
  Bytes s_is_n = b;
  const auto& n = core::curve_order();
  std::copy(n.begin(), n.end(), s_is_n.begin() + 73 + 32);
  CHECK(errc_of([&] { decode_credential(s_is_n); }) == DecodeErrc::InvalidSignatureRange);

  // High-s is in range: decoding keeps it so that verification can reject it.
  Credential mauled = fixed_credential();
  mauled.sigma_p = core::mirror_s(mauled.sigma_p);
  CHECK(decode_credential(encode_credential(mauled)) == mauled);
}

TEST_CASE("verify message for alice is 244 bytes", "[wire][message]") {
  const AuthMessage msg{kWireVersion, MessageType::Verify, "alice", core::Challenge{}, fixed_credential(), std::nullopt};
  const Bytes enc = encode_auth_message(msg);
  CHECK(enc.size() == 244);
  CHECK(enc.size() == 36 + 5 + 203);
  CHECK(decode_auth_message(enc) == msg);
  CHECK(auth_message_size(1, MessageType::Verify) == 240);
  CHECK(auth_message_size(5, MessageType::Change) == 36 + 5 + 406);
}

TEST_CASE("decode_auth_message error taxonomy", "[wire][message]") {
  const Credential& c = fixed_credential();
  const AuthMessage change{kWireVersion, MessageType::Change, "alice", core::Challenge{}, c, c};
  const Bytes enc = encode_auth_message(change);
  REQUIRE(enc.size() == 36 + 5 + 406);

  CHECK(errc_of([&] { decode_auth_message(ByteView(enc).first(enc.size() - 1)); }) == DecodeErrc::TruncatedChange);
  CHECK(errc_of([&] { decode_auth_message(ByteView(enc).first(36 + 5 + 203)); }) == DecodeErrc::TruncatedChange);
  CHECK(errc_of([&] { decode_auth_message(ByteView(enc).first(36 + 5 + 202)); }) == DecodeErrc::BadLength);
  CHECK(errc_of([&] { decode_auth_message(ByteView(enc).first(35)); }) == DecodeErrc::BadLength);

  Bytes t9 = enc;
  t9[1] = 9;
  CHECK(errc_of([&] { decode_auth_message(t9); }) == DecodeErrc::UnknownType);
  Bytes t0 = enc;
  t0[1] = 0;
  CHECK(errc_of([&] { decode_auth_message(t0); }) == DecodeErrc::UnknownType);
  Bytes v2 = enc;
  v2[0] = 2;
  CHECK(errc_of([&] { decode_auth_message(v2); }) == DecodeErrc::BadVersion);

  // A verify message carrying a second blob is the wrong length for its type.
  Bytes as_verify = enc;
  as_verify[1] = 2;
  CHECK(errc_of([&] { decode_auth_message(as_verify); }) == DecodeErrc::BadLength);

  Bytes bad_utf8 = enc;
  bad_utf8[4] = 0xc0;  // overlong lead byte
  CHECK(errc_of([&] { decode_auth_message(bad_utf8); }) == DecodeErrc::InvalidUserId);

  Bytes empty_user;
  empty_user.push_back(1);
  empty_user.push_back(2);
  put_u16_be(empty_user, 0);
  append(empty_user, Bytes(32, 0));
  append(empty_user, encode_credential(c));
  CHECK(errc_of([&] { decode_auth_message(empty_user); }) == DecodeErrc::InvalidUserId);

  AuthMessage bad = change;
  bad.cred_new.reset();
  CHECK_THROWS_AS(encode_auth_message(bad), std::invalid_argument);
  bad = change;
  bad.user_id.clear();
  CHECK_THROWS_AS(encode_auth_message(bad), std::invalid_argument);
}

TEST_CASE("property: binary round-trip and closed-form sizes", "[wire][property]") {
  Gen g(0x5eed0001);
  for (int i = 0; i < 1500; ++i) {
    const AuthMessage msg = random_message(g);
    const Bytes enc = encode_auth_message(msg);
    REQUIRE(enc.size() == auth_message_size(msg.user_id.size(), msg.type));
    REQUIRE(decode_auth_message(enc) == msg);
    const ChallengeGrant grant{g.challenge(), g.engine()()};
    REQUIRE(decode_grant(encode_grant(grant)) == grant);
  }
}

TEST_CASE("property: JSON round-trip", "[wire][json][property]") {
  Gen g(0x5eed0002);
  for (int i = 0; i < 1000; ++i) {
    const AuthMessage msg = random_message(g);
    const std::string text = auth_message_to_json(msg).dump();
    REQUIRE(auth_message_from_json_text(text) == msg);
    const ChallengeGrant grant{g.challenge(), g.engine()()};
    REQUIRE(grant_from_json(grant_to_json(grant)) == grant);
  }
}

TEST_CASE("JSON field names and encodings", "[wire][json]") {
  Credential c = fixed_credential();
  c.browser_time = std::numeric_limits<std::uint64_t>::max();
  const AuthMessage msg{kWireVersion, MessageType::Change, "alice", core::Challenge{}, c, c};
  const auto j = auth_message_to_json(msg);

  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  CHECK(keys == std::vector<std::string>{"challenge", "cred", "cred_new", "type", "user_id", "version"});
  std::vector<std::string> cred_keys;
  for (const auto& [k, v] : j["cred"].items()) cred_keys.push_back(k);
  std::sort(cred_keys.begin(), cred_keys.end());
  CHECK(cred_keys == std::vector<std::string>{"browser_time", "sigma_b", "sigma_p", "v_b", "v_p"});

  CHECK(j["version"] == 1);
  CHECK(j["type"] == 3);
  CHECK(j["cred"]["browser_time"] == "18446744073709551615");
  CHECK(j["challenge"] == "AAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAAA");
  CHECK(j["cred"]["v_p"].get<std::string>().size() == 44);
  CHECK(auth_message_from_json(j) == msg);
}

TEST_CASE("JSON decoding rejects malformed bodies", "[wire][json]") {
  const AuthMessage msg{kWireVersion, MessageType::Verify, "alice", core::Challenge{}, fixed_credential(), std::nullopt};
  const auto good = auth_message_to_json(msg);

  CHECK(errc_of([] { auth_message_from_json_text("{not json"); }) == DecodeErrc::MalformedJson);
  CHECK(errc_of([] { auth_message_from_json_text("[]"); }) == DecodeErrc::MalformedJson);

  auto j = good;
  j.erase("challenge");
  CHECK(errc_of([&] { auth_message_from_json(j); }) == DecodeErrc::MalformedJson);
  j = good;
  j["extra"] = 1;
  CHECK(errc_of([&] { auth_message_from_json(j); }) == DecodeErrc::MalformedJson);
  j = good;
  j["challenge"] = "AAAA";
  CHECK(errc_of([&] { auth_message_from_json(j); }) == DecodeErrc::BadLength);
  j = good;
  j["challenge"] = "!!!!";
  CHECK(errc_of([&] { auth_message_from_json(j); }) == DecodeErrc::MalformedJson);
  j = good;
  j["type"] = 9;
  CHECK(errc_of([&] { auth_message_from_json(j); }) == DecodeErrc::UnknownType);
  j = good;
  j["type"] = "2";
  CHECK(errc_of([&] { auth_message_from_json(j); }) == DecodeErrc::MalformedJson);
  j = good;
  j["version"] = 7;
  CHECK(errc_of([&] { auth_message_from_json(j); }) == DecodeErrc::BadVersion);
  j = good;
  j["type"] = 3;
  CHECK(errc_of([&] { auth_message_from_json(j); }) == DecodeErrc::TruncatedChange);
  j = good;
  j["cred_new"] = good["cred"];
  CHECK(errc_of([&] { auth_message_from_json(j); }) == DecodeErrc::MalformedJson);
  j = good;
  j["user_id"] = "";
  CHECK(errc_of([&] { auth_message_from_json(j); }) == DecodeErrc::InvalidUserId);

  for (const char* t : {"01", "-1", "+1", "18446744073709551616", "1e3", " 1", ""}) {
    j = good;
    j["cred"]["browser_time"] = t;
    CHECK(errc_of([&] { auth_message_from_json(j); }) == DecodeErrc::MalformedJson);
  }
  j = good;
  j["cred"]["browser_time"] = 1700000000;
  CHECK(errc_of([&] { auth_message_from_json(j); }) == DecodeErrc::MalformedJson);
}

TEST_CASE("property: decoding arbitrary bytes is total", "[wire][fuzz]") {
  Gen g(0x5eed0003);
  std::vector<Bytes> seeds;
  for (int i = 0; i < 8; ++i) seeds.push_back(encode_auth_message(random_message(g)));

  std::size_t accepted = 0;
  for (int i = 0; i < 20000; ++i) {
    Bytes input;
    switch (g.below(3)) {
      case 0:
        input = g.bytes(g.below(700));
        break;
      case 1: {
        input = seeds[g.below(seeds.size())];
        const std::size_t flips = 1 + g.below(4);
        for (std::size_t k = 0; k < flips; ++k) input[g.below(input.size())] ^= static_cast<std::uint8_t>(1 + g.below(255));
        break;
      }
      default: {
        input = seeds[g.below(seeds.size())];
        input.resize(g.below(input.size() + 8), 0);
        break;
      }
    }
    try {
      const AuthMessage m = decode_auth_message(input);
      // Anything accepted is canonical.
      REQUIRE(encode_auth_message(m) == input);
      ++accepted;
    } catch (const DecodeError&) {
    }
    try {
      decode_credential(input);
    } catch (const DecodeError&) {
    }
  }
  CHECK(accepted > 0);
}

TEST_CASE("store record lines round-trip", "[wire][records]") {
  Gen g(0x5eed0004);
  for (int i = 0; i < 200; ++i) {
    UserRecord u;
    u.user_id = random_user(g) + " with space";
    u.p_p = core::StoredIdentifier::from_bytes(g.bytes(64));
    u.created_at = g.below(1u << 31);
    u.updated_at = u.created_at + g.below(1000);
    const std::size_t nb = g.below(11);
    for (std::size_t k = 0; k < nb; ++k) {
      const std::uint64_t first = g.below(1u << 31);
      u.browsers.push_back(BrowserEntry{core::StoredIdentifier::from_bytes(g.bytes(64)), first,
                                        first + g.below(5000), g.below(100)});
    }
    const std::string text = format_user_record(u);
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
      const std::size_t nl = text.find('\n', start);
      lines.push_back(text.substr(start, nl - start));
      start = nl + 1;
    }
    REQUIRE(lines.size() == 1 + nb);
    UserRecord back = parse_user_line(lines[0]);
    for (std::size_t k = 1; k < lines.size(); ++k) {
      auto [owner, entry] = parse_browser_line(lines[k]);
      REQUIRE(owner == u.user_id);
      back.browsers.push_back(entry);
    }
    REQUIRE(back == u);
  }

  CHECK_THROWS_AS(parse_user_line("user YWxpY2U"), RecordError);
  CHECK_THROWS_AS(parse_user_line("browser a b 1 2 3"), RecordError);
  const std::string ok_id = std::string(86, 'A');
  CHECK_THROWS_AS(parse_browser_line("browser YQ " + ok_id + " 5 4 0"), RecordError);
  CHECK_THROWS_AS(parse_browser_line("browser YQ " + ok_id + " 1 2 x"), RecordError);
  CHECK_NOTHROW(parse_browser_line("browser YQ " + ok_id + " 1 2 0"));
}

TEST_CASE("measure_sizes reports the canonical figures", "[wire][sizes]") {
  const SizeReport r = measure_sizes();
  CHECK(r.transmission_bytes == 244);
  CHECK(r.transmission_bytes <= 512);
  CHECK(r.storage_bytes_per_user <= kReferenceStorageBytes);
  // user line: 5 + 7 + 1 + 86 + 1 + 10 + 1 + 10 + 1 = 122
  // browser line: 8 + 7 + 1 + 86 + 1 + 10 + 1 + 10 + 1 + 1 + 1 = 127
  CHECK(r.storage_bytes_per_user == 122 + 127);
  CHECK(kReferenceTransmissionBytes == 401);
}
