#include <catch_amalgamated.hpp>

#include "credfield/core/credential.hpp"
#include "credfield/core/error.hpp"
#include "oracle.hpp"
#include "support/helpers.hpp"
#include "support/vectors.hpp"

using namespace credfield;
using namespace credfield::core;
using testsupport::challenge_from_hex;
using testsupport::scalar_from_hex;
using testsupport::scalar_from_int;
using testsupport::vectors;

namespace {

Errc errc_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const CoreError& e) {
    return e.code();
  }
  FAIL("expected CoreError");
  return Errc::CryptoFailure;
}

const CanonicalOrigin kBank = CanonicalOrigin::parse("https://bank.example");
const KdfParams kParams{};

}  // namespace

TEST_CASE("canonical_origin normalizes case and default ports", "[core][origin]") {
  CHECK(canonical_origin("https://Bank.Example:443/login?x=1").serialize() == "https://bank.example");
  CHECK(canonical_origin("http://intra.corp:8080/a").serialize() == "http://intra.corp:8080");
  CHECK(canonical_origin("HTTP://Example.com:80").serialize() == "http://example.com");
  CHECK(canonical_origin("https://user:pw@host.example:8443/#frag").serialize() == "https://host.example:8443");
  CHECK(canonical_origin("http://[::1]:3000/x").serialize() == "http://[::1]:3000");
  CHECK(canonical_origin("https://example.com:/p").serialize() == "https://example.com");
  CHECK(canonical_origin("https://a.example").port() == std::nullopt);
  CHECK(canonical_origin("https://a.example:80").port() == 80);
}

TEST_CASE("canonical_origin rejects bad input with typed errors", "[core][origin]") {
  CHECK(errc_of([] { canonical_origin("ftp://x"); }) == Errc::UnsupportedScheme);
  CHECK(errc_of([] { canonical_origin("javascript://x"); }) == Errc::UnsupportedScheme);
  CHECK(errc_of([] { canonical_origin("bank.example/login"); }) == Errc::MalformedUrl);
  CHECK(errc_of([] { canonical_origin("https://"); }) == Errc::MalformedUrl);
  CHECK(errc_of([] { canonical_origin("https://exa mple.com"); }) == Errc::MalformedUrl);
  CHECK(errc_of([] { canonical_origin("https://host:99999"); }) == Errc::MalformedUrl);
  CHECK(errc_of([] { canonical_origin("https://host:12a"); }) == Errc::MalformedUrl);
  CHECK(errc_of([] { canonical_origin("https://[::1"); }) == Errc::MalformedUrl);
  CHECK(errc_of([] { canonical_origin("1https://x"); }) == Errc::MalformedUrl);
}

TEST_CASE("canonical_origin parse then serialize is idempotent", "[core][origin][property]") {
  testsupport::Gen gen(7);
  const char* schemes[] = {"http", "HTTPS", "Http", "https"};
  for (int i = 0; i < 500; ++i) {
    std::string url = std::string(schemes[gen.below(4)]) + "://" + gen.text(1, 10, "aBcDeF019-") + ".Example";
    if (gen.below(2) == 1) url += ":" + std::to_string(gen.below(65536));
    if (gen.below(2) == 1) url += "/" + gen.text(0, 8, "abc/?#=&");
    const CanonicalOrigin once = canonical_origin(url);
    const CanonicalOrigin twice = canonical_origin(once.serialize());
    REQUIRE(once == twice);
    REQUIRE(once.serialize() == twice.serialize());
  }
}

TEST_CASE("build_salt is length-prefixed", "[core][salt]") {
  const Bytes salt = build_salt(kBank, "alice");
  Bytes expected{0x00, 0x14};
  append(expected, as_bytes("https://bank.example"));
  append(expected, Bytes{0x00, 0x05});
  append(expected, as_bytes("alice"));
  CHECK(salt == expected);
  CHECK(to_hex(salt) == vectors()["password_scalar"][0]["salt"].get<std::string>());

  CHECK(build_salt(canonical_origin("https://a"), "bc") != build_salt(canonical_origin("https://ab"), "c"));
  CHECK(errc_of([] { build_salt(canonical_origin("https://x"), ""); }) == Errc::EmptyUserId);
  CHECK(errc_of([] { build_salt(canonical_origin("https://x"), std::string(70000, 'u')); }) ==
        Errc::FieldTooLong);
}

TEST_CASE("derive_password_scalar matches the frozen PBKDF2 vectors", "[core][kdf][oracle]") {
  for (const auto& v : vectors()["password_scalar"]) {
    const SecretString pw(v["password"].get<std::string>());
    const auto origin = canonical_origin(v["origin"].get<std::string>());
    REQUIRE(origin.serialize() == v["origin"].get<std::string>());
    const SecretScalar s = derive_password_scalar(pw, origin, v["user_id"].get<std::string>(), kParams);
    CHECK(to_hex(s.reveal()) == v["scalar"].get<std::string>());
    CHECK(to_hex(PublicKey::from_secret(s).bytes()) == v["v_p"].get<std::string>());
  }
}

TEST_CASE("derive_password_scalar agrees with the live oracle", "[core][kdf][oracle]") {
  const SecretScalar s = derive_password_scalar(SecretString("correct horse"), kBank, "alice", kParams);
  const oracle::Int expected = oracle::password_scalar("correct horse", "https://bank.example", "alice", 1000);
  CHECK(to_hex(s.reveal()) == oracle::to_hex(oracle::to_be(expected, 32)));

  // Low iteration count exercises the params hook against the same oracle.
  const SecretScalar s3 = derive_password_scalar(SecretString("pw"), kBank, "bob", KdfParams{3});
  CHECK(to_hex(s3.reveal()) ==
        oracle::to_hex(oracle::to_be(oracle::password_scalar("pw", "https://bank.example", "bob", 3), 32)));
}

TEST_CASE("derive_password_scalar is deterministic and origin bound", "[core][kdf]") {
  const SecretString pw("correct horse");
  const SecretScalar a = derive_password_scalar(pw, kBank, "alice", kParams);
  const SecretScalar b = derive_password_scalar(pw, kBank, "alice", kParams);
  CHECK(to_hex(a.reveal()) == to_hex(b.reveal()));
  const SecretScalar evil = derive_password_scalar(pw, canonical_origin("https://evil.example"), "alice", kParams);
  CHECK(to_hex(a.reveal()) != to_hex(evil.reveal()));
  CHECK(to_hex(evil.reveal()) == vectors()["password_scalar"][1]["scalar"].get<std::string>());

  CHECK(errc_of([&] { derive_password_scalar(SecretString(""), kBank, "alice", kParams); }) == Errc::EmptyPassword);
  CHECK(errc_of([&] { derive_password_scalar(pw, kBank, "", kParams); }) == Errc::EmptyUserId);
}

TEST_CASE("scalar mapping stays in [1, n-1] at the edges", "[core][kdf]") {
  // dk = 0 -> 1; dk = n-1 -> 1; dk = n-2 -> n-1.
  const auto& n = curve_order();
  const oracle::Int n_int = oracle::from_be(Bytes(n.begin(), n.end()));
  auto widen = [](const oracle::Int& v) { return oracle::to_be(v, 48); };
  CHECK(to_hex(scalar_from_kdf_output(Bytes(48, 0)).reveal()) == oracle::to_hex(oracle::to_be(1, 32)));
  CHECK(to_hex(scalar_from_kdf_output(widen(n_int - 1)).reveal()) == oracle::to_hex(oracle::to_be(1, 32)));
  CHECK(to_hex(scalar_from_kdf_output(widen(n_int - 2)).reveal()) == oracle::to_hex(oracle::to_be(n_int - 1, 32)));
  CHECK_NOTHROW(scalar_from_kdf_output(Bytes(48, 0xff)));
}

TEST_CASE("SecretScalar enforces its range", "[core][scalar]") {
  CHECK(errc_of([] { SecretScalar::from_bytes(Bytes(32, 0)); }) == Errc::InvalidScalar);
  const auto& n = curve_order();
  CHECK(errc_of([&] { SecretScalar::from_bytes(n); }) == Errc::InvalidScalar);
  CHECK(errc_of([] { SecretScalar::from_bytes(Bytes(31, 1)); }) == Errc::InvalidScalar);
  CHECK(SecretScalar::from_bytes(Bytes(32, 1)).debug_string().find("redacted") != std::string::npos);
}

TEST_CASE("generate_browser_key samples uniformly by rejection", "[core][keygen]") {
  const EntropySource sys = system_entropy();
  const SecretScalar a = generate_browser_key(sys);
  const SecretScalar b = generate_browser_key(sys);
  CHECK(to_hex(a.reveal()) != to_hex(b.reveal()));

  // First draw is >= n, second is zero, third is valid: only the third may come back.
  int draws = 0;
  const EntropySource scripted = [&](std::span<std::uint8_t> out) {
    ++draws;
    if (draws == 1) std::fill(out.begin(), out.end(), 0xff);
    else if (draws == 2) std::fill(out.begin(), out.end(), 0x00);
    else std::fill(out.begin(), out.end(), 0x42);
  };
  const SecretScalar c = generate_browser_key(scripted);
  CHECK(draws == 3);
  CHECK(to_hex(c.reveal()) == to_hex(Bytes(32, 0x42)));

  // Exactly n is rejected too.
  draws = 0;
  const EntropySource order_then_one = [&](std::span<std::uint8_t> out) {
    ++draws;
    if (draws == 1) std::copy(curve_order().begin(), curve_order().end(), out.begin());
    else {
      std::fill(out.begin(), out.end(), 0);
      out.back() = 1;
    }
  };
  CHECK(to_hex(generate_browser_key(order_then_one).reveal()) == to_hex(scalar_from_int(1).reveal()));

  const EntropySource broken = [](std::span<std::uint8_t> out) { std::fill(out.begin(), out.end(), 0xff); };
  CHECK(errc_of([&] { generate_browser_key(broken); }) == Errc::EntropyFailure);
  const EntropySource failing = [](std::span<std::uint8_t>) { throw CoreError(Errc::EntropyFailure, "down"); };
  CHECK(errc_of([&] { generate_browser_key(failing); }) == Errc::EntropyFailure);
}

TEST_CASE("sign_deterministic matches the frozen RFC 6979 vectors", "[core][ecdsa][oracle]") {
  for (const auto& v : vectors()["sign_deterministic"]) {
    const SecretScalar key = scalar_from_hex(v["key"].get<std::string>());
    const Digest digest = to_array<32>(from_hex(v["digest"].get<std::string>()));
    const Signature sig = sign_deterministic(key, digest);
    CHECK(to_hex(sig.compact()) == v["signature"].get<std::string>());
    CHECK(sig.is_low_s());
    CHECK(verify_signature(digest, sig, PublicKey::from_secret(key)));
  }
}

TEST_CASE("sign_deterministic agrees with the live oracle on random inputs", "[core][ecdsa][oracle]") {
  testsupport::Gen gen(11);
  for (int i = 0; i < 10; ++i) {
    const Bytes key_bytes = gen.bytes(32);
    const oracle::Int key_int = 1 + oracle::from_be(key_bytes) % (oracle::curve_order() - 1);
    const Bytes key_be = oracle::to_be(key_int, 32);
    const Bytes digest = gen.bytes(32);
    const Signature sig = sign_deterministic(SecretScalar::from_bytes(key_be), to_array<32>(digest));
    CHECK(to_hex(sig.compact()) == oracle::to_hex(oracle::ecdsa_sign(key_int, digest)));
  }
}

TEST_CASE("signatures are deterministic and verification is strict", "[core][ecdsa]") {
  const SecretScalar k = scalar_from_int(12345);
  const PublicKey pub = PublicKey::from_secret(k);
  const Digest d = sha256(as_bytes("message"));
  const Signature s1 = sign_deterministic(k, d);
  const Signature s2 = sign_deterministic(k, d);
  CHECK(s1 == s2);
  CHECK(verify_signature(d, s1, pub));

  Signature flipped = s1;
  flipped.r[17] ^= 0x01;
  CHECK_FALSE(verify_signature(d, flipped, pub));

  CHECK_FALSE(verify_signature(d, s1, PublicKey::from_secret(scalar_from_int(54321))));

  const Signature high = mirror_s(s1);
  CHECK_FALSE(high.is_low_s());
  CHECK(high.in_range());
  CHECK_FALSE(verify_signature(d, high, pub));

  Signature zero_r = s1;
  zero_r.r.fill(0);
  CHECK_FALSE(verify_signature(d, zero_r, pub));
  Signature big_s = s1;
  big_s.s.fill(0xff);
  CHECK_FALSE(verify_signature(d, big_s, pub));

  Digest other = d;
  other[0] ^= 0x80;
  CHECK_FALSE(verify_signature(other, s1, pub));
}

TEST_CASE("PublicKey decoding validates the point", "[core][ecdsa]") {
  const PublicKey g = PublicKey::from_secret(scalar_from_int(1));
  CHECK(to_hex(g.bytes()) == "0279be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798");
  const auto round = PublicKey::from_compressed(g.bytes());
  REQUIRE(round.has_value());
  CHECK(*round == g);

  Bytes bad_prefix(g.bytes().begin(), g.bytes().end());
  bad_prefix[0] = 0x04;
  CHECK_FALSE(PublicKey::from_compressed(bad_prefix).has_value());
  CHECK_FALSE(PublicKey::from_compressed(Bytes(32, 2)).has_value());

  // Smallest x with no curve point, found by brute force in the oracle.
  unsigned x = 1;
  while (oracle::x_on_curve(x)) ++x;
  Bytes off_curve = oracle::to_be(x, 33);
  off_curve[0] = 0x02;
  CHECK_FALSE(PublicKey::from_compressed(off_curve).has_value());

  // x >= p is not a field element.
  Bytes too_big(33, 0xff);
  too_big[0] = 0x02;
  CHECK_FALSE(PublicKey::from_compressed(too_big).has_value());
}

TEST_CASE("store_identifier matches the frozen PBKDF2 vectors", "[core][store][oracle]") {
  for (const auto& v : vectors()["store_identifier"]) {
    const auto pub = PublicKey::from_compressed(from_hex(v["v"].get<std::string>()));
    REQUIRE(pub.has_value());
    const StoredIdentifier p = store_identifier(from_hex(v["salt"].get<std::string>()), *pub, kParams);
    CHECK(to_hex(p.bytes()) == v["p"].get<std::string>());
  }
}

TEST_CASE("store_identifier separates password and browser salts", "[core][store]") {
  const PublicKey v = PublicKey::from_secret(scalar_from_int(99));
  CHECK(store_password_identifier("alice", v, kParams) == store_password_identifier("alice", v, kParams));
  CHECK(store_password_identifier("alice", v, kParams) != store_browser_identifier(v, kParams));
  CHECK(to_hex(store_browser_identifier(v, kParams).bytes()) ==
        oracle::to_hex(oracle::store_identifier({}, Bytes(v.bytes().begin(), v.bytes().end()), 1000)));
}

TEST_CASE("derive reproduces the fixed credential vector", "[core][derive][oracle]") {
  const auto& v = vectors()["derive"][0];
  REQUIRE(v["password"] == "correct horse");
  REQUIRE(v["browser_time"] == 1700000000);
  const Bytes blob = from_hex(v["credential"].get<std::string>());
  REQUIRE(blob.size() == 203);

  const SecretScalar browser_key = scalar_from_int(1);
  const Credential c = derive("alice", Challenge{}, SecretString("correct horse"), kBank, 1700000000,
                              browser_key, kParams);
  CHECK(c.browser_time == 1700000000);
  CHECK(to_hex(c.sigma_p.compact()) == to_hex(ByteView(blob).subspan(9, 64)));
  CHECK(to_hex(c.sigma_b.compact()) == to_hex(ByteView(blob).subspan(73, 64)));
  CHECK(to_hex(c.v_p.bytes()) == to_hex(ByteView(blob).subspan(137, 33)));
  CHECK(to_hex(c.v_b.bytes()) == to_hex(ByteView(blob).subspan(170, 33)));

  const Credential again = derive("alice", Challenge{}, SecretString("correct horse"), kBank, 1700000000,
                                  browser_key, kParams);
  CHECK(again == c);

  Challenge other{};
  other.nonce[31] = 1;
  const Credential moved = derive("alice", other, SecretString("correct horse"), kBank, 1700000000, browser_key,
                                  kParams);
  CHECK(moved.sigma_p != c.sigma_p);
  CHECK(moved.v_p == c.v_p);
}

TEST_CASE("derive output never carries the password or secret scalars", "[core][derive][secrecy]") {
  const std::string password = "correct horse";
  const SecretScalar browser_key = scalar_from_int(0x5eed);
  const Credential c = derive("alice", Challenge{}, SecretString(password), kBank, 1700000000, browser_key, kParams);
  const SecretScalar s_p = derive_password_scalar(SecretString(password), kBank, "alice", kParams);

  Bytes out;
  append(out, c.sigma_p.compact());
  append(out, c.sigma_b.compact());
  append(out, c.v_p.bytes());
  append(out, c.v_b.bytes());
  CHECK_FALSE(testsupport::contains(out, as_bytes(password)));
  CHECK_FALSE(testsupport::contains(out, s_p.reveal()));
  CHECK_FALSE(testsupport::contains(out, browser_key.reveal()));
  CHECK_FALSE(testsupport::contains(browser_key.debug_string(), to_hex(browser_key.reveal())));
}

namespace {

struct Enrolled {
  Credential cred;
  StoredIdentifier p_p;
  StoredIdentifier p_b;
};

Enrolled make(const Challenge& challenge, std::uint64_t t, std::string_view user = "alice",
              const char* password = "correct horse", const CanonicalOrigin& origin = kBank) {
  const SecretScalar bk = scalar_from_int(777);
  Credential c = derive(user, challenge, SecretString(password), origin, t, bk, kParams);
  return {c, store_password_identifier(user, c.v_p, kParams), store_browser_identifier(c.v_b, kParams)};
}

}  // namespace

TEST_CASE("verify_credential_stateless accepts a fresh credential", "[core][verify]") {
  const Challenge ch = testsupport::Gen(3).challenge();
  const Enrolled e = make(ch, 1700000000);
  const std::vector<StoredIdentifier> browsers{e.p_b};
  const VerifyOutcome ok = verify_credential_stateless("alice", ch, 1700000000, e.cred, e.p_p, browsers, {}, kParams);
  CHECK(ok.accepted);
  CHECK(ok.browser_known);
  REQUIRE(ok.browser_id.has_value());
  CHECK(*ok.browser_id == e.p_b);
  // Accept implies the store identifier recomputes to the stored one.
  CHECK(store_password_identifier("alice", e.cred.v_p, kParams) == e.p_p);

  const VerifyOutcome unknown = verify_credential_stateless("alice", ch, 1700000000, e.cred, e.p_p, {}, {}, kParams);
  CHECK(unknown.accepted);
  CHECK_FALSE(unknown.browser_known);
}

TEST_CASE("verify_credential_stateless applies the time window", "[core][verify]") {
  const Challenge ch{};
  const TimeWindow window{120, 30};
  const std::uint64_t now = 1700000000;
  const std::vector<StoredIdentifier> none;

  const Enrolled at_limit = make(ch, now - 120);
  CHECK(verify_credential_stateless("alice", ch, now, at_limit.cred, at_limit.p_p, none, window, kParams).accepted);

  const Enrolled expired = make(ch, now - 121);
  const auto r1 = verify_credential_stateless("alice", ch, now, expired.cred, expired.p_p, none, window, kParams);
  CHECK(r1.reason == VerifyReject::Expired);

  const Enrolled slight_future = make(ch, now + 30);
  CHECK(verify_credential_stateless("alice", ch, now, slight_future.cred, slight_future.p_p, none, window, kParams)
            .accepted);

  const Enrolled future = make(ch, now + 31);
  const auto r2 = verify_credential_stateless("alice", ch, now, future.cred, future.p_p, none, window, kParams);
  CHECK(r2.reason == VerifyReject::FutureTimestamp);
}

TEST_CASE("verify_credential_stateless rejects tampering in a fixed order", "[core][verify]") {
  const Challenge ch = testsupport::Gen(5).challenge();
  const std::uint64_t now = 1700000000;
  const Enrolled e = make(ch, now);
  const std::vector<StoredIdentifier> browsers{e.p_b};
  auto run = [&](const Credential& c, const StoredIdentifier& p) {
    return verify_credential_stateless("alice", ch, now, c, p, browsers, {}, kParams);
  };

  Credential bad_p = e.cred;
  bad_p.sigma_p.r[0] ^= 0x01;
  CHECK(run(bad_p, e.p_p).reason == VerifyReject::BadPasswordSignature);

  Credential bad_b = e.cred;
  bad_b.sigma_b.s[31] ^= 0x01;
  CHECK(run(bad_b, e.p_p).reason == VerifyReject::BadBrowserSignature);

  Credential shifted_time = e.cred;
  shifted_time.browser_time += 1;
  CHECK(run(shifted_time, e.p_p).reason == VerifyReject::BadBrowserSignature);

  const Enrolled other_pw = make(ch, now, "alice", "wrong horse");
  CHECK(run(other_pw.cred, e.p_p).reason == VerifyReject::UnknownPassword);

  // Time is checked before identifiers: an expired credential with the wrong password reports Expired.
  Credential old_wrong = other_pw.cred;
  old_wrong.browser_time = now - 1000;
  CHECK(run(old_wrong, e.p_p).reason == VerifyReject::Expired);

  // Identifier before signatures.
  Credential wrong_and_tampered = other_pw.cred;
  wrong_and_tampered.sigma_p.r[0] ^= 0x01;
  CHECK(run(wrong_and_tampered, e.p_p).reason == VerifyReject::UnknownPassword);
}

TEST_CASE("challenge binding: a credential fails under any other challenge", "[core][verify][property]") {
  testsupport::Gen gen(17);
  const std::uint64_t now = 1700000000;
  const SecretScalar bk = scalar_from_int(31337);
  for (int i = 0; i < 100; ++i) {
    const std::string user = gen.user();
    const std::string password = gen.password();
    const Challenge c1 = gen.challenge();
    Challenge c2 = gen.challenge();
    if (c2 == c1) c2.nonce[0] ^= 1;
    const Credential cred = derive(user, c1, SecretString(password), kBank, now, bk, kParams);
    const StoredIdentifier p_p = store_password_identifier(user, cred.v_p, kParams);
    const auto out = verify_credential_stateless(user, c2, now, cred, p_p, {}, {}, kParams);
    REQUIRE_FALSE(out.accepted);
    REQUIRE(out.reason == VerifyReject::BadPasswordSignature);
  }
}

TEST_CASE("origin binding: distinct origins give distinct V_p", "[core][derive][property]") {
  testsupport::Gen gen(23);
  for (int i = 0; i < 1000; ++i) {
    const std::string user = gen.user();
    const SecretString pw(gen.password());
    const CanonicalOrigin o1 = canonical_origin("https://" + gen.host());
    CanonicalOrigin o2 = canonical_origin("https://" + gen.host());
    if (o2 == o1) o2 = canonical_origin("http://" + o1.host());
    REQUIRE(password_public_key(pw, o1, user, kParams) != password_public_key(pw, o2, user, kParams));
  }
}

TEST_CASE("every derived scalar and signature respects its invariants", "[core][property]") {
  testsupport::Gen gen(29);
  for (int i = 0; i < 50; ++i) {
    const SecretScalar s = derive_password_scalar(SecretString(gen.password()), kBank, gen.user(), kParams);
    CHECK_NOTHROW(SecretScalar::from_bytes(s.reveal()));
    const Signature sig = sign_deterministic(s, sha256(gen.bytes(40)));
    CHECK(sig.in_range());
    CHECK(sig.is_low_s());
  }
}
