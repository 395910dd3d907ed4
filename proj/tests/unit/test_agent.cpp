#include <catch_amalgamated.hpp>

#include <sys/stat.h>

#include "credfield/agent/agent.hpp"
#include "support/fixtures.hpp"
#include "support/helpers.hpp"
#include "support/secrets.hpp"
#include "support/vectors.hpp"

using namespace credfield;
using namespace credfield::agent;
using server::Code;
using testsupport::bank;
using testsupport::config_for;
using testsupport::TempDir;

namespace {

struct FixedClock {
  std::uint64_t now = 1700000000;
  Clock clock() {
    return [this] { return now; };
  }
};

/// Hands out one fixed challenge and accepts everything.
class StubLink : public ServerLink {
 public:
  explicit StubLink(core::Challenge c) : challenge_(c) {}
  wire::ChallengeGrant challenge(const core::CanonicalOrigin&) override { return {challenge_, 0}; }
  server::Decision send(const wire::AuthMessage&, const core::CanonicalOrigin&) override {
    return server::Decision::of(Code::Accept);
  }

 private:
  core::Challenge challenge_;
};

/// One server, one clock, any number of browsers.
struct World {
  FixedClock clock;
  server::AuthServer server;
  InProcessLink direct;
  RecordingLink link;

  explicit World(server::PolicyMode mode = server::PolicyMode::HighSecurity)
      : server(config_for(mode)), direct(server, clock.clock()), link(direct) {}

  Agent agent(AgentProfile& p) { return Agent(p, link, clock.clock()); }
};

AgentProfile profile(std::string_view label) { return ephemeral_profile(testsupport::browser_key(label)); }

}  // namespace

TEST_CASE("open_profile creates once and reloads the same key", "[agent][profile]") {
  TempDir dir;
  const auto path = dir / "profile";
  FixedClock clock;
  const AgentProfile a = open_profile(path, core::system_entropy(), clock.clock());
  CHECK(std::filesystem::exists(path));
  struct stat st {};
  REQUIRE(::stat(path.c_str(), &st) == 0);
  CHECK((st.st_mode & 0777) == 0600);
  const std::string text = testsupport::read_file(path);
  CHECK(text.rfind(std::string(AgentProfile::kHeader) + "\n", 0) == 0);
  CHECK(a.created_at == clock.now);

  clock.now += 1000;
  const AgentProfile b = open_profile(path, core::system_entropy(), clock.clock());
  CHECK(to_hex(a.browser_key.reveal()) == to_hex(b.browser_key.reveal()));
  CHECK(b.created_at == a.created_at);
  CHECK(testsupport::read_file(path) == text);

  const AgentProfile other = open_profile(dir / "other");
  CHECK(to_hex(other.browser_key.reveal()) != to_hex(a.browser_key.reveal()));
}

TEST_CASE("damaged profiles are reported as CorruptProfile", "[agent][profile]") {
  TempDir dir;
  const std::string good_key = std::string(64, '0').replace(63, 1, "7");
  const std::vector<std::string> bad = {
      "",
      "credfield-profile v2\nkey " + good_key + "\ncreated 1\n",
      "credfield-profile v1\nkey " + good_key + "\n",
      "credfield-profile v1\ncreated 1\n",
      "credfield-profile v1\nkey 00\ncreated 1\n",
      "credfield-profile v1\nkey " + std::string(64, '0') + "\ncreated 1\n",
      "credfield-profile v1\nkey " + std::string(64, 'f') + "\ncreated 1\n",
      "credfield-profile v1\nkey " + std::string(64, 'z') + "\ncreated 1\n",
      "credfield-profile v1\nkey " + good_key + "\ncreated -1\n",
      "credfield-profile v1\nkey " + good_key + "\nkey " + good_key + "\ncreated 1\n",
      "credfield-profile v1\nkey " + good_key + "\ncreated 1\nextra 1\n",
  };
  int i = 0;
  for (const auto& text : bad) {
    const auto path = dir / ("p" + std::to_string(i++));
    {
      std::ofstream out(path, std::ios::binary);
      out << text;
    }
    CHECK_THROWS_MATCHES(open_profile(path), ProfileError, Catch::Matchers::Predicate<ProfileError>([](const auto& e) {
                           return e.kind() == ProfileError::Kind::CorruptProfile;
                         }));
  }
  const auto good = dir / "good";
  {
    std::ofstream out(good, std::ios::binary);
    out << "credfield-profile v1\nkey " << good_key << "\ncreated 5\n";
  }
  CHECK(open_profile(good).created_at == 5);
  CHECK_THROWS_MATCHES(open_profile(dir / "missing-dir" / "p"), ProfileError,
                       Catch::Matchers::Predicate<ProfileError>([](const auto& e) {
                         return e.kind() == ProfileError::Kind::IoError;
                       }));
}

TEST_CASE("knob soundness: zeroed knobs reproduce the fixed derive vectors", "[agent][vectors]") {
  for (const auto& v : testsupport::vectors()["derive"]) {
    FixedClock clock{v["browser_time"].get<std::uint64_t>()};
    StubLink stub(testsupport::challenge_from_hex(v["challenge"].get<std::string>()));
    RecordingLink rec(stub);
    AgentProfile p = ephemeral_profile(testsupport::scalar_from_hex(v["browser_key"].get<std::string>()));
    Agent agent(p, rec, clock.clock());
    const auto origin = core::CanonicalOrigin::parse(v["origin"].get<std::string>());
    REQUIRE(agent.login(origin, v["user_id"].get<std::string>(), SecretString(v["password"].get<std::string>())).code ==
            Code::Accept);
    const auto sent = rec.sent();
    REQUIRE(sent.size() == 1);
    CHECK(to_hex(wire::encode_credential(sent[0].cred)) == v["credential"].get<std::string>());
  }
}

TEST_CASE("login through the agent", "[agent][login]") {
  World w;
  AgentProfile laptop = profile("laptop");
  Agent a = w.agent(laptop);
  REQUIRE(a.enrol_flow(bank(), "alice", SecretString("correct horse"), SecretString("correct horse")).code ==
          Code::Enrolled);
  CHECK(a.login(bank(), "alice", SecretString("correct horse")).code == Code::Accept);
  CHECK(a.login(bank(), "alice", SecretString("correct h0rse")).code == Code::UnknownPassword);

  SECTION("spoofed origin fails at the real server") {
    laptop.perceived_origin_override = core::CanonicalOrigin::parse("https://bank.example.evil.example");
    CHECK(a.login(bank(), "alice", SecretString("correct horse")).code == Code::UnknownPassword);
  }
  SECTION("clock skew") {
    laptop.clock_skew = 3600;
    CHECK(a.login(bank(), "alice", SecretString("correct horse")).code == Code::FutureTimestamp);
    laptop.clock_skew = 30;
    CHECK(a.login(bank(), "alice", SecretString("correct horse")).code == Code::Accept);
    laptop.clock_skew = -121;
    CHECK(a.login(bank(), "alice", SecretString("correct horse")).code == Code::Expired);
  }
  SECTION("empty password never reaches the server") {
    const auto before = w.link.egress().requests.size();
    CHECK(a.login(bank(), "alice", SecretString("")).code == Code::BadRequest);
    // Only the challenge request went out.
    CHECK(w.link.egress().requests.size() == before + 1);
  }
}

TEST_CASE("enrol_flow catches mismatched entries locally", "[agent][enrol]") {
  World w;
  AgentProfile p = profile("laptop");
  Agent a = w.agent(p);
  for (auto [first, second] : {std::pair{"pw1-longer", "pw2-longer"}, std::pair{"correct horse", "correct hors"},
                               std::pair{"correct horse", "Correct horse"}}) {
    CHECK(a.enrol_flow(bank(), "alice", SecretString(first), SecretString(second)).code == Code::PasswordMismatch);
  }
  CHECK(w.link.egress().requests.empty());
  CHECK_FALSE(w.server.user("alice").has_value());
}

TEST_CASE("change_flow", "[agent][change]") {
  World w;
  AgentProfile p = profile("laptop");
  Agent a = w.agent(p);
  REQUIRE(a.enrol_flow(bank(), "alice", SecretString("old password"), SecretString("old password")).code ==
          Code::Enrolled);
  const auto stored = w.server.user("alice")->p_p;

  CHECK(a.change_flow(bank(), "alice", SecretString("not the one"), SecretString("new password")).code ==
        Code::UnknownPassword);
  CHECK(w.server.user("alice")->p_p == stored);

  REQUIRE(a.change_flow(bank(), "alice", SecretString("old password"), SecretString("new password")).code ==
          Code::PasswordChanged);
  CHECK(a.login(bank(), "alice", SecretString("old password")).code == Code::UnknownPassword);
  CHECK(a.login(bank(), "alice", SecretString("new password")).code == Code::Accept);

  // One challenge, two derivations, one message.
  const auto sent = w.link.sent();
  const auto& change = sent[sent.size() - 3];
  CHECK(change.type == wire::MessageType::Change);
  REQUIRE(change.cred_new.has_value());
  CHECK(change.cred_new->v_b == change.cred.v_b);

  // The new credential derived through another browser profile.
  AgentProfile other = profile("other");
  Agent b = w.agent(other);
  const auto grant = w.server.issue_challenge(bank(), w.clock.now);
  auto msg = a.build(wire::MessageType::Change, grant.challenge, bank(), "alice", SecretString("new password"));
  msg.cred_new = b.build(wire::MessageType::Change, grant.challenge, bank(), "alice", SecretString("third")).cred;
  CHECK(w.server.change_password(msg, bank(), w.clock.now).code == Code::BrowserMismatch);
}

TEST_CASE("property: TOFU stability over many logins from one profile", "[agent][property]") {
  TempDir dir;
  World w(server::PolicyMode::Personal);
  AgentProfile p = open_profile(dir / "profile");
  {
    Agent a = w.agent(p);
    REQUIRE(a.enrol_flow(bank(), "alice", SecretString("pw-alice-1"), SecretString("pw-alice-1")).code ==
            Code::Enrolled);
  }
  for (int i = 0; i < 25; ++i) {
    // Reopen each round, as a browser restart would.
    AgentProfile again = open_profile(dir / "profile");
    Agent a = w.agent(again);
    w.clock.now += 60;
    REQUIRE(a.login(bank(), "alice", SecretString("pw-alice-1")).code == Code::Accept);
  }
  const auto sent = w.link.sent();
  for (const auto& m : sent) CHECK(m.cred.v_b == sent.front().cred.v_b);
  const auto u = w.server.user("alice");
  REQUIRE(u->browsers.size() == 1);
  CHECK(u->browsers[0].login_count == 25);
  CHECK(w.server.events().empty());
}

TEST_CASE("property: agent egress carries no password material", "[agent][property][secrets]") {
  testsupport::Gen g(4242);
  World w(server::PolicyMode::Enterprise);
  testsupport::SecretSet secrets;
  for (int i = 0; i < 20; ++i) {
    const std::string user = "user" + std::to_string(i);
    const std::string pw = g.password() + "-" + std::to_string(i);
    const std::string pw2 = g.password() + "+" + std::to_string(i);
    AgentProfile p = profile("browser" + std::to_string(i));
    secrets.add_password(pw, bank(), user);
    secrets.add_password(pw2, bank(), user);
    secrets.add_key(p.browser_key);
    Agent a = w.agent(p);
    REQUIRE(a.enrol_flow(bank(), user, SecretString(pw), SecretString(pw)).code == Code::Enrolled);
    REQUIRE(a.login(bank(), user, SecretString(pw)).code == Code::Accept);
    REQUIRE(a.change_flow(bank(), user, SecretString(pw), SecretString(pw2)).code == Code::PasswordChanged);
    REQUIRE(a.login(bank(), user, SecretString(pw)).code == Code::UnknownPassword);
  }
  const auto egress = w.link.egress();
  // Per flow: the challenge request plus the message in binary and JSON form.
  CHECK(egress.requests.size() == 20 * 4 * 3);
  for (const auto& r : egress.requests) REQUIRE(secrets.find_in(r).empty());
  for (const auto& r : egress.responses) REQUIRE(secrets.find_in(r).empty());
  REQUIRE(secrets.find_in(w.server.snapshot().serialize()).empty());
}

TEST_CASE("unreachable server is a TransportError", "[agent][http]") {
  HttpLink link("http://127.0.0.1:1");
  AgentProfile p = profile("laptop");
  Agent a(p, link);
  const auto d = a.login(bank(), "alice", SecretString("correct horse"));
  CHECK(d.code == Code::TransportError);
  CHECK_THROWS_AS(HttpLink("https://bank.example"), TransportFailure);
  CHECK_THROWS_AS(HttpLink("http://host:99999"), TransportFailure);
  CHECK_NOTHROW(HttpLink("http://localhost:8080/"));
}
