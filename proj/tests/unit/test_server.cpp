#include <catch_amalgamated.hpp>

#include <atomic>
#include <thread>

#include "credfield/core/error.hpp"
#include "credfield/server/auth_server.hpp"
#include "support/fixtures.hpp"
#include "support/helpers.hpp"

using namespace credfield;
using namespace credfield::server;
using testsupport::bank;
using testsupport::browser_key;
using testsupport::config_for;
using testsupport::Session;
using testsupport::TempDir;
using wire::MessageType;

namespace {

// Eq. (3) soundness: the stored values are recomputable from what was presented.
void check_store_matches(const AuthServer& server, const wire::AuthMessage& msg) {
  const auto u = server.user(msg.user_id);
  REQUIRE(u.has_value());
  const core::Credential& presented = msg.cred_new ? *msg.cred_new : msg.cred;
  CHECK(u->p_p == core::store_password_identifier(msg.user_id, presented.v_p, server.config().kdf));
  const auto p_b = core::store_browser_identifier(presented.v_b, server.config().kdf);
  CHECK(std::any_of(u->browsers.begin(), u->browsers.end(), [&](const BrowserEntry& b) { return b.p_b == p_b; }));
}

core::StoredIdentifier p_b_of(const core::SecretScalar& key) {
  return core::store_browser_identifier(core::PublicKey::from_secret(key), core::KdfParams{});
}

}  // namespace

TEST_CASE("policy defaults per mode", "[server][config]") {
  const auto hi = PolicyParams::defaults(PolicyMode::HighSecurity);
  const auto ent = PolicyParams::defaults(PolicyMode::Enterprise);
  const auto per = PolicyParams::defaults(PolicyMode::Personal);
  CHECK(hi.history_cap == 5);
  CHECK(ent.history_cap == 5);
  CHECK(per.history_cap == 10);
  CHECK(hi.unknown_browser_action == UnknownBrowserAction::StepUp);
  CHECK(ent.unknown_browser_action == UnknownBrowserAction::AllowAndAlert);
  CHECK(per.unknown_browser_action == UnknownBrowserAction::AllowAndNotify);
  for (const auto& p : {hi, ent, per}) {
    CHECK(p.shared_browser_user_threshold == 10);
    CHECK(p.blacklist_enforced);
  }
  CHECK(per.deny_shared_browsers);
  CHECK_FALSE(hi.deny_shared_browsers);
}

TEST_CASE("server config validation and JSON", "[server][config]") {
  ServerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.delta == 120);
  CHECK(cfg.skew == 30);
  CHECK(cfg.challenge_ttl == 300);

  ServerConfig bad = cfg;
  bad.delta = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.challenge_ttl = 119;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.origin = "ftp://x";
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(AuthServer(bad), ConfigError);

  cfg.policy = PolicyParams::defaults(PolicyMode::Personal);
  cfg.policy.history_cap = 7;
  cfg.delta = 60;
  CHECK(config_from_json(config_to_json(cfg)) == cfg);

  const auto partial = config_from_json(nlohmann::json::parse(R"({"policy":{"mode":"HighSecurity"},"skew":5})"));
  CHECK(partial.policy == PolicyParams::defaults(PolicyMode::HighSecurity));
  CHECK(partial.skew == 5);
  CHECK(partial.delta == 120);

  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"policy":{"mode":"Paranoid"}})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"delta":-1})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"delta":500})")), ConfigError);
  CHECK_THROWS_AS(config_from_json(nlohmann::json::parse(R"({"iterations":4294967296})")), ConfigError);

  TempDir dir;
  {
    std::ofstream out(dir / "cfg.json");
    out << config_to_json(cfg).dump(2);
  }
  CHECK(load_config(dir / "cfg.json") == cfg);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
}

TEST_CASE("decision codes map to HTTP statuses and round-trip through JSON", "[server][decision]") {
  CHECK(http_status(Code::Accept) == 200);
  CHECK(http_status(Code::Enrolled) == 200);
  CHECK(http_status(Code::PasswordChanged) == 200);
  CHECK(http_status(Code::BadRequest) == 400);
  CHECK(http_status(Code::UserExists) == 409);
  CHECK(http_status(Code::StepUpRequired) == 428);
  CHECK(http_status(Code::Internal) == 500);
  for (Code c : {Code::AlreadyConsumed, Code::UnknownPassword, Code::BlacklistDenied, Code::Expired,
                 Code::BrowserMismatch, Code::UnknownUser, Code::OriginMismatch}) {
    CHECK(http_status(c) == 401);
  }
  for (int i = 0; i <= static_cast<int>(Code::TransportError); ++i) {
    const auto c = static_cast<Code>(i);
    CHECK(code_from_string(to_string(c)) == c);
    Decision d = Decision::of(c, "x");
    d.browser_known = (i % 2) == 0;
    const Decision back = decision_from_json(decision_to_json(d));
    CHECK(back.code == d.code);
    CHECK(back.detail == d.detail);
    CHECK(back.browser_known == d.browser_known);
  }
  CHECK_FALSE(code_from_string("Nope").has_value());
  CHECK_THROWS_AS(decision_from_json(nlohmann::json{{"code", "Nope"}}), std::invalid_argument);
}

TEST_CASE("challenge issuance and single redemption", "[server][challenge]") {
  ChallengeRegistry reg(300);
  const std::uint64_t t = 1000;
  const auto a = reg.issue(bank(), t);
  const auto b = reg.issue(bank(), t);
  CHECK_FALSE(a.challenge == b.challenge);
  CHECK(a.expires_at == t + 300);
  CHECK(wire::encode_grant(a).size() == 40);

  CHECK(reg.redeem(a.challenge, bank(), t + 1) == Code::Accept);
  CHECK(reg.redeem(a.challenge, bank(), t + 2) == Code::AlreadyConsumed);

  const auto evil = core::CanonicalOrigin::parse("https://evil.example");
  CHECK(reg.redeem(b.challenge, evil, t) == Code::OriginMismatch);
  // A mismatched attempt does not burn the challenge for its rightful origin.
  CHECK(reg.redeem(b.challenge, bank(), t + 300) == Code::Accept);

  const auto c = reg.issue(bank(), t);
  CHECK(reg.redeem(c.challenge, bank(), t + 301) == Code::ChallengeExpired);
  CHECK(reg.redeem(core::Challenge{}, bank(), t) == Code::UnknownChallenge);

  ChallengeRegistry stuck(300, [](std::span<std::uint8_t> out) { std::fill(out.begin(), out.end(), 7); });
  CHECK_NOTHROW(stuck.issue(bank(), t));
  CHECK_THROWS_AS(stuck.issue(bank(), t), core::CoreError);
}

TEST_CASE("property: concurrent redemption of one challenge succeeds once", "[server][challenge][concurrency]") {
  ChallengeRegistry reg(300);
  for (int round = 0; round < 200; ++round) {
    const auto g = reg.issue(bank(), 10);
    std::atomic<int> accepted{0};
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i) {
      threads.emplace_back([&] {
        if (reg.redeem(g.challenge, bank(), 11) == Code::Accept) ++accepted;
      });
    }
    for (auto& th : threads) th.join();
    REQUIRE(accepted == 1);
  }
}

TEST_CASE("concurrent verify calls sharing a challenge: at most one proceeds", "[server][concurrency]") {
  AuthServer server(config_for(PolicyMode::Enterprise));
  Session s(server);
  const auto key = browser_key("laptop");
  REQUIRE(s.enrol("alice", "pw-alice", key).code == Code::Enrolled);
  for (int round = 0; round < 5; ++round) {
    const auto msg = s.build(MessageType::Verify, "alice", "pw-alice", key);
    std::atomic<int> accepted{0};
    std::atomic<int> consumed{0};
    std::vector<std::thread> threads;
    for (int i = 0; i < 6; ++i) {
      threads.emplace_back([&] {
        const auto d = server.verify(msg, bank(), s.now());
        if (d.code == Code::Accept) ++accepted;
        if (d.code == Code::AlreadyConsumed) ++consumed;
      });
    }
    for (auto& th : threads) th.join();
    CHECK(accepted == 1);
    CHECK(consumed == 5);
  }
}

TEST_CASE("enrol stores P_p and one browser", "[server][enrol]") {
  AuthServer server(config_for(PolicyMode::Enterprise));
  Session s(server);
  const auto key = browser_key("laptop");
  const auto msg = s.build(MessageType::Enrol, "alice", "correct horse", key);
  const Decision d = server.enrol(msg, bank(), s.now());
  REQUIRE(d.code == Code::Enrolled);
  check_store_matches(server, msg);
  const auto u = server.user("alice");
  REQUIRE(u->browsers.size() == 1);
  CHECK(u->created_at == s.now());
  CHECK(u->browsers[0].first_seen == s.now());

  CHECK(s.enrol("alice", "other", browser_key("phone")).code == Code::UserExists);
  CHECK(server.enrol(msg, bank(), s.now()).code == Code::AlreadyConsumed);

  // Wrong message type.
  CHECK(server.enrol(s.build(MessageType::Verify, "bob", "pw", key), bank(), s.now()).code == Code::BadRequest);

  // Expired challenge: nothing stored.
  const auto late = s.build(MessageType::Enrol, "carol", "pw", key);
  CHECK(server.enrol(late, bank(), s.now() + 301).code == Code::ChallengeExpired);
  CHECK_FALSE(server.user("carol").has_value());

  // Tampered proof of possession.
  auto forged = s.build(MessageType::Enrol, "dave", "pw", key);
  forged.cred.sigma_b.s[31] ^= 1;
  CHECK(server.enrol(forged, bank(), s.now()).code == Code::BadBrowserSignature);
  CHECK_FALSE(server.user("dave").has_value());
}

TEST_CASE("verify accepts the enrolled browser and reports rejections", "[server][verify]") {
  AuthServer server(config_for(PolicyMode::HighSecurity));
  Session s(server);
  const auto key = browser_key("laptop");
  REQUIRE(s.enrol("alice", "correct horse", key).code == Code::Enrolled);

  const auto msg = s.build(MessageType::Verify, "alice", "correct horse", key);
  const Decision ok = server.verify(msg, bank(), s.now());
  REQUIRE(ok.code == Code::Accept);
  CHECK(ok.browser_known);
  check_store_matches(server, msg);
  CHECK(server.user("alice")->browsers[0].login_count == 1);

  CHECK(s.login("alice", "wrong horse", key).code == Code::UnknownPassword);
  CHECK(s.login("mallory", "correct horse", key).code == Code::UnknownUser);

  // Credential older than delta at verification time.
  auto stale = s.build(MessageType::Verify, "alice", "correct horse", key);
  CHECK(server.verify(stale, bank(), s.now() + 121).code == Code::Expired);
  auto fresh_enough = s.build(MessageType::Verify, "alice", "correct horse", key);
  CHECK(server.verify(fresh_enough, bank(), s.now() + 120).code == Code::Accept);

  // Browser clock far ahead.
  const auto g = server.issue_challenge(bank(), s.now());
  const auto future = testsupport::message_for(MessageType::Verify, g.challenge, "alice", "correct horse", bank(),
                                               s.now() + 3600, key);
  CHECK(server.verify(future, bank(), s.now()).code == Code::FutureTimestamp);

  // Challenge issued for another origin.
  const auto evil = core::CanonicalOrigin::parse("https://evil.example");
  const auto g2 = server.issue_challenge(evil, s.now());
  const auto relayed = testsupport::message_for(MessageType::Verify, g2.challenge, "alice", "correct horse", bank(),
                                                s.now(), key);
  CHECK(server.verify(relayed, bank(), s.now()).code == Code::OriginMismatch);

  CHECK(server.submit(Bytes{1, 2, 3}, bank(), s.now()).code == Code::BadRequest);
}

TEST_CASE("HighSecurity: unknown browser needs step-up", "[server][policy]") {
  AuthServer server(config_for(PolicyMode::HighSecurity));
  std::vector<PolicyEvent> seen;
  server.set_event_sink([&](const PolicyEvent& e) { seen.push_back(e); });
  Session s(server);
  REQUIRE(s.enrol("alice", "pw", browser_key("laptop")).code == Code::Enrolled);

  const auto phone = browser_key("phone");
  const Decision d = s.login("alice", "pw", phone);
  CHECK(d.code == Code::StepUpRequired);
  CHECK_FALSE(d.browser_known);
  REQUIRE(seen.size() == 1);
  CHECK(seen[0].kind == EventKind::StepUpRequired);
  CHECK(seen[0].p_b == p_b_of(phone));
  CHECK(server.events() == seen);
  CHECK(server.user("alice")->browsers.size() == 1);
  CHECK(server.snapshot().pending().size() == 1);

  CHECK_FALSE(server.confirm_step_up("alice", p_b_of(browser_key("tablet")), s.now()));
  CHECK(server.confirm_step_up("alice", p_b_of(phone), s.now()));
  CHECK(server.snapshot().pending().empty());
  const Decision again = s.login("alice", "pw", phone);
  CHECK(again.code == Code::Accept);
  CHECK(again.browser_known);
}

TEST_CASE("Enterprise and Personal: unknown browser allowed with an event", "[server][policy]") {
  for (auto [mode, kind] : {std::pair{PolicyMode::Enterprise, EventKind::UnknownBrowserAlert},
                            std::pair{PolicyMode::Personal, EventKind::NewBrowserNotification}}) {
    AuthServer server(config_for(mode));
    Session s(server);
    REQUIRE(s.enrol("alice", "pw", browser_key("laptop")).code == Code::Enrolled);
    const Decision d = s.login("alice", "pw", browser_key("phone"));
    CHECK(d.code == Code::Accept);
    CHECK_FALSE(d.browser_known);
    REQUIRE(server.events().size() == 1);
    CHECK(server.events()[0].kind == kind);
    CHECK(server.user("alice")->browsers.size() == 2);
    // Registered now, so the next login is a known-browser accept without events.
    const Decision d2 = s.login("alice", "pw", browser_key("phone"));
    CHECK(d2.browser_known);
    CHECK(server.events().size() == 1);
  }
}

TEST_CASE("blacklisted browsers are denied in every mode", "[server][policy]") {
  for (auto mode : {PolicyMode::HighSecurity, PolicyMode::Enterprise, PolicyMode::Personal}) {
    AuthServer server(config_for(mode));
    Session s(server);
    const auto key = browser_key("laptop");
    REQUIRE(s.enrol("alice", "pw", key).code == Code::Enrolled);
    CHECK_FALSE(server.is_blacklisted(p_b_of(key)));
    server.blacklist_browser(p_b_of(key));
    CHECK(server.is_blacklisted(p_b_of(key)));
    CHECK(s.login("alice", "pw", key).code == Code::BlacklistDenied);
    CHECK(server.events().back().kind == EventKind::BlacklistDenied);
    CHECK(s.enrol("bob", "pw", key).code == Code::BlacklistDenied);
    CHECK_FALSE(server.user("bob").has_value());
  }
  ServerConfig lax = config_for(PolicyMode::Personal);
  lax.policy.blacklist_enforced = false;
  AuthServer server(lax);
  Session s(server);
  const auto key = browser_key("laptop");
  REQUIRE(s.enrol("alice", "pw", key).code == Code::Enrolled);
  server.blacklist_browser(p_b_of(key));
  CHECK(s.login("alice", "pw", key).code == Code::Accept);
}

TEST_CASE("history cap is never exceeded and evicts least-recently-seen", "[server][policy]") {
  for (auto mode : {PolicyMode::Enterprise, PolicyMode::Personal}) {
    AuthServer server(config_for(mode));
    const std::size_t cap = server.config().policy.history_cap;
    Session s(server);
    REQUIRE(s.enrol("alice", "pw", browser_key("b0")).code == Code::Enrolled);
    for (std::size_t i = 1; i < 3 * cap; ++i) {
      s.advance(1);
      REQUIRE(s.login("alice", "pw", browser_key("b" + std::to_string(i))).code == Code::Accept);
      REQUIRE(server.user("alice")->browsers.size() <= cap);
    }
    CHECK(server.user("alice")->browsers.size() == cap);
  }

  AuthServer server(config_for(PolicyMode::Enterprise));
  Session s(server);
  REQUIRE(s.enrol("alice", "pw", browser_key("A")).code == Code::Enrolled);
  for (const char* k : {"B", "C", "D", "E"}) {
    s.advance(10);
    REQUIRE(s.login("alice", "pw", browser_key(k)).code == Code::Accept);
  }
  s.advance(10);
  REQUIRE(s.login("alice", "pw", browser_key("A")).browser_known);  // A is now the most recent
  s.advance(10);
  REQUIRE(s.login("alice", "pw", browser_key("F")).code == Code::Accept);
  const auto u = *server.user("alice");
  auto has = [&](const char* k) {
    return std::any_of(u.browsers.begin(), u.browsers.end(), [&](const BrowserEntry& b) { return b.p_b == p_b_of(browser_key(k)); });
  };
  CHECK(has("A"));
  CHECK_FALSE(has("B"));
  CHECK(has("F"));
  CHECK(u.browsers.size() == 5);
}

TEST_CASE("shared browser: 12 users on one profile cross the threshold", "[server][policy]") {
  const auto shared_key = browser_key("kiosk");
  std::vector<std::string> users;
  for (int i = 0; i < 12; ++i) users.push_back("user" + std::to_string(i));

  SECTION("HighSecurity excludes it from the known set") {
    AuthServer server(config_for(PolicyMode::HighSecurity));
    Session s(server);
    for (const auto& u : users) REQUIRE(s.enrol(u, "pw-" + u, shared_key).code == Code::Enrolled);
    CHECK(server.snapshot().browser_user_count(p_b_of(shared_key)) == 12);
    const Decision d = s.login("user0", "pw-user0", shared_key);
    CHECK(d.code == Code::StepUpRequired);
    CHECK_FALSE(d.browser_known);
  }
  SECTION("Enterprise accepts but alerts") {
    AuthServer server(config_for(PolicyMode::Enterprise));
    Session s(server);
    for (const auto& u : users) REQUIRE(s.enrol(u, "pw-" + u, shared_key).code == Code::Enrolled);
    const Decision d = s.login("user3", "pw-user3", shared_key);
    CHECK(d.code == Code::Accept);
    CHECK_FALSE(d.browser_known);
    CHECK(server.events().back().kind == EventKind::UnknownBrowserAlert);
  }
  SECTION("Personal denies it") {
    AuthServer server(config_for(PolicyMode::Personal));
    Session s(server);
    for (std::size_t i = 0; i < users.size(); ++i) {
      const Code c = s.enrol(users[i], "pw-" + users[i], shared_key).code;
      CHECK(c == (i < 10 ? Code::Enrolled : Code::BlacklistDenied));
    }
    CHECK(s.login("user0", "pw-user0", shared_key).code == Code::BlacklistDenied);
    // Below the threshold the same browser is simply known.
    ServerConfig cfg = config_for(PolicyMode::Personal);
    cfg.policy.shared_browser_user_threshold = 20;
    AuthServer relaxed(cfg);
    Session r(relaxed);
    for (const auto& u : users) REQUIRE(r.enrol(u, "pw-" + u, shared_key).code == Code::Enrolled);
    CHECK(r.login("user0", "pw-user0", shared_key).browser_known);
  }
}

TEST_CASE("change_password replaces P_p atomically", "[server][change]") {
  AuthServer server(config_for(PolicyMode::HighSecurity));
  Session s(server);
  const auto key = browser_key("laptop");
  REQUIRE(s.enrol("alice", "old-pw", key).code == Code::Enrolled);
  const auto before = server.snapshot();

  SECTION("valid change") {
    const auto msg = s.build_change("alice", "old-pw", "new-pw", key, key);
    const Decision d = server.change_password(msg, bank(), s.now());
    REQUIRE(d.code == Code::PasswordChanged);
    check_store_matches(server, msg);
    CHECK(s.login("alice", "old-pw", key).code == Code::UnknownPassword);
    CHECK(s.login("alice", "new-pw", key).code == Code::Accept);
    CHECK(server.change_password(msg, bank(), s.now()).code == Code::AlreadyConsumed);
  }
  SECTION("new credential from a different browser") {
    const auto msg = s.build_change("alice", "old-pw", "new-pw", key, browser_key("other"));
    CHECK(server.change_password(msg, bank(), s.now()).code == Code::BrowserMismatch);
    CHECK(server.snapshot() == before);
  }
  SECTION("wrong old password") {
    CHECK(s.change("alice", "not-it", "new-pw", key).code == Code::UnknownPassword);
    CHECK(server.snapshot() == before);
    CHECK(s.login("alice", "old-pw", key).code == Code::Accept);
  }
  SECTION("tampered new credential") {
    auto msg = s.build_change("alice", "old-pw", "new-pw", key, key);
    msg.cred_new->sigma_p.r[5] ^= 0x40;
    CHECK(server.change_password(msg, bank(), s.now()).code == Code::BadPasswordSignature);
    CHECK(server.snapshot() == before);
  }
  SECTION("unknown browser under step-up policy does not change anything") {
    const auto other = browser_key("other");
    const auto msg = s.build_change("alice", "old-pw", "new-pw", other, other);
    CHECK(server.change_password(msg, bank(), s.now()).code == Code::StepUpRequired);
    CHECK(server.user("alice")->p_p == before.find_user("alice")->p_p);
  }
  SECTION("verify message is not a change") {
    CHECK(server.change_password(s.build(MessageType::Verify, "alice", "old-pw", key), bank(), s.now()).code ==
          Code::BadRequest);
  }
}

TEST_CASE("replay: 1000 resubmissions of an accepted message are all refused", "[server][replay]") {
  AuthServer server(config_for(PolicyMode::Enterprise));
  Session s(server);
  const auto key = browser_key("laptop");
  REQUIRE(s.enrol("alice", "pw", key).code == Code::Enrolled);
  const Bytes wire_bytes = wire::encode_auth_message(s.build(MessageType::Verify, "alice", "pw", key));
  REQUIRE(server.submit(wire_bytes, bank(), s.now()).code == Code::Accept);
  int accepted = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto d = server.submit(wire_bytes, bank(), s.now() + static_cast<std::uint64_t>(i % 100));
    if (d.ok()) ++accepted;
    REQUIRE(d.code == Code::AlreadyConsumed);
  }
  CHECK(accepted == 0);
}

TEST_CASE("store persist/load round-trip", "[server][store]") {
  TempDir dir;
  const auto path = dir / "store.txt";
  CredentialStore empty = CredentialStore::load(path);
  CHECK(empty.users().empty());
  CHECK(CredentialStore::load({}).users().empty());

  AuthServer server(config_for(PolicyMode::HighSecurity), path);
  Session s(server);
  REQUIRE(s.enrol("alice", "pw", browser_key("a")).code == Code::Enrolled);
  REQUIRE(s.enrol("b\xc3\xb6 b", "pw", browser_key("b")).code == Code::Enrolled);
  REQUIRE(s.login("alice", "pw", browser_key("c")).code == Code::StepUpRequired);
  server.blacklist_browser(p_b_of(browser_key("z")));

  const CredentialStore loaded = CredentialStore::load(path);
  CHECK(loaded == server.snapshot());
  CHECK(loaded.serialize() == testsupport::read_file(path));
  CHECK(loaded.pending().size() == 1);
  CHECK(loaded.events().size() == 1);
  CHECK(loaded.is_blacklisted(p_b_of(browser_key("z"))));
  CHECK(loaded.browser_user_count(p_b_of(browser_key("a"))) == 1);

  // A restarted server sees the same state.
  AuthServer restarted(config_for(PolicyMode::HighSecurity), path);
  Session r(restarted, s.now());
  CHECK(r.login("alice", "pw", browser_key("a")).code == Code::Accept);

  const std::string text = testsupport::read_file(path);
  CHECK(text.rfind(std::string(CredentialStore::kHeader) + "\n", 0) == 0);
  for (std::size_t cut : {text.size() - 1, text.size() / 2, std::size_t{5}}) {
    CHECK_THROWS_MATCHES(CredentialStore::parse(text.substr(0, cut)), StoreError,
                         Catch::Matchers::Predicate<StoreError>([](const StoreError& e) {
                           return e.kind() == StoreError::Kind::CorruptStore;
                         }));
  }
  std::string flipped = text;
  flipped[flipped.find("user ") + 6] ^= 1;
  CHECK_THROWS_AS(CredentialStore::parse(flipped), StoreError);
  std::string wrong_version = text;
  wrong_version.replace(0, CredentialStore::kHeader.size(), "credfield-store v9");
  CHECK_THROWS_AS(CredentialStore::parse(wrong_version), StoreError);
  {
    std::ofstream out(dir / "trunc.txt", std::ios::binary);
    out << text.substr(0, text.size() / 3);
  }
  CHECK_THROWS_AS(AuthServer(config_for(PolicyMode::HighSecurity), dir / "trunc.txt"), StoreError);
}

TEST_CASE("property: failed flows leave the persisted store byte-identical", "[server][store][property]") {
  TempDir dir;
  const auto path = dir / "store.txt";
  AuthServer server(config_for(PolicyMode::HighSecurity), path);
  Session s(server);
  const auto key = browser_key("laptop");
  REQUIRE(s.enrol("alice", "pw", key).code == Code::Enrolled);
  const std::string digest = testsupport::file_digest(path);

  testsupport::Gen g(77);
  for (int i = 0; i < 40; ++i) {
    Decision d;
    switch (i % 8) {
      case 0: d = s.login("alice", "wrong" + std::to_string(i), key); break;
      case 1: d = s.enrol("alice", "pw", key); break;
      case 2: d = s.login("nobody", "pw", key); break;
      case 3: {
        auto m = s.build(MessageType::Verify, "alice", "pw", key);
        d = server.verify(m, bank(), s.now() + 500);
        break;
      }
      case 4: {
        auto m = s.build(MessageType::Verify, "alice", "pw", key);
        m.cred.sigma_b = core::mirror_s(m.cred.sigma_b);
        d = server.verify(m, bank(), s.now());
        break;
      }
      case 5: d = s.change("alice", "bad", "new", key); break;
      case 6: {
        auto m = s.build_change("alice", "pw", "new", key, browser_key("x"));
        d = server.change_password(m, bank(), s.now());
        break;
      }
      default: d = server.submit(g.bytes(g.below(600)), bank(), s.now()); break;
    }
    REQUIRE_FALSE(d.ok());
    REQUIRE(d.code != Code::StepUpRequired);
    REQUIRE(testsupport::file_digest(path) == digest);
  }
}

TEST_CASE("loading under a smaller cap trims history", "[server][store]") {
  TempDir dir;
  const auto path = dir / "store.txt";
  {
    AuthServer personal(config_for(PolicyMode::Personal), path);
    Session s(personal);
    REQUIRE(s.enrol("alice", "pw", browser_key("k0")).code == Code::Enrolled);
    for (int i = 1; i < 9; ++i) {
      s.advance(1);
      REQUIRE(s.login("alice", "pw", browser_key("k" + std::to_string(i))).code == Code::Accept);
    }
    REQUIRE(personal.user("alice")->browsers.size() == 9);
  }
  AuthServer enterprise(config_for(PolicyMode::Enterprise), path);
  const auto u = *enterprise.user("alice");
  CHECK(u.browsers.size() == 5);
  // Survivors are the five most recent.
  for (const auto& b : u.browsers) CHECK(b.last_seen >= 1700000004);
}
