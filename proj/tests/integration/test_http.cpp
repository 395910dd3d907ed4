#include <catch_amalgamated.hpp>

#include <httplib.h>

#include <atomic>
#include <random>
#include <thread>

#include "credfield/agent/agent.hpp"
#include "credfield/http/service.hpp"
#include "credfield/wire/json.hpp"
#include "support/fixtures.hpp"
#include "support/helpers.hpp"

using namespace credfield;
using server::Code;
using testsupport::bank;
using testsupport::config_for;
using testsupport::TempDir;

namespace {

core::EntropySource seeded(std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [rng](std::span<std::uint8_t> out) {
    for (auto& b : out) b = static_cast<std::uint8_t>((*rng)());
  };
}

struct Clock {
  std::atomic<std::uint64_t> now{1700000000};
  agent::Clock fn() {
    return [this] { return now.load(); };
  }
};

/// Server + service on an ephemeral port.
struct Running {
  Clock clock;
  server::AuthServer server;
  http::HttpService service;

  Running(server::PolicyMode mode, std::filesystem::path store = {}, http::ServiceOptions opts = {},
          core::EntropySource entropy = core::system_entropy())
      : server(config_for(mode), std::move(store), std::move(entropy)), service(server, with_port0(opts), clock.fn()) {
    service.start();
  }

  static http::ServiceOptions with_port0(http::ServiceOptions o) {
    o.port = 0;
    return o;
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(service.port()); }
  httplib::Client client() const { return httplib::Client("127.0.0.1", service.port()); }
};

const std::string kOriginQuery = "?origin=https%3A%2F%2Fbank.example";

}  // namespace

TEST_CASE("challenge endpoint", "[http]") {
  Running r(server::PolicyMode::Enterprise);
  auto cli = r.client();
  auto res = cli.Get("/challenge" + kOriginQuery);
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Content-Type") == "application/json");
  const auto j = nlohmann::json::parse(res->body);
  CHECK(j["challenge"].get<std::string>().size() == 43);
  CHECK(j["expires_at"] == "1700000300");
  CHECK_NOTHROW(wire::grant_from_json(j));

  auto dflt = cli.Get("/challenge");
  REQUIRE(dflt);
  CHECK(dflt->status == 200);

  auto bad = cli.Get("/challenge?origin=ftp%3A%2F%2Fx");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  CHECK(nlohmann::json::parse(bad->body)["code"] == "BadRequest");

  CHECK(cli.Get("/")->status == 404);
}

TEST_CASE("flows over HTTP map decisions to statuses", "[http]") {
  TempDir dir;
  const auto store = dir / "store.txt";
  Running r(server::PolicyMode::HighSecurity, store);
  agent::HttpLink link(r.url());
  agent::RecordingLink rec(link);
  agent::AgentProfile laptop = agent::ephemeral_profile(testsupport::browser_key("laptop"));
  agent::Agent a(laptop, rec, r.clock.fn());

  REQUIRE(a.enrol_flow(bank(), "alice", SecretString("pw-alice-1"), SecretString("pw-alice-1")).code == Code::Enrolled);
  CHECK(std::filesystem::exists(store));
  CHECK(server::CredentialStore::load(store) == r.server.snapshot());
  CHECK(a.login(bank(), "alice", SecretString("pw-alice-1")).code == Code::Accept);

  auto cli = r.client();
  const std::string body = wire::auth_message_to_json(rec.sent().back()).dump();
  auto replay = cli.Post("/login" + kOriginQuery, body, "application/json");
  REQUIRE(replay);
  CHECK(replay->status == 401);
  CHECK(nlohmann::json::parse(replay->body)["code"] == "AlreadyConsumed");

  CHECK(a.enrol_flow(bank(), "alice", SecretString("pw-alice-1"), SecretString("pw-alice-1")).code == Code::UserExists);
  {
    const auto g = wire::grant_from_json(nlohmann::json::parse(cli.Get("/challenge" + kOriginQuery)->body));
    const auto dup = a.build(wire::MessageType::Enrol, g.challenge, bank(), "alice", SecretString("pw-alice-1"));
    auto exists = cli.Post("/enrol" + kOriginQuery, wire::auth_message_to_json(dup).dump(), "application/json");
    REQUIRE(exists);
    CHECK(exists->status == 409);
    CHECK(nlohmann::json::parse(exists->body)["code"] == "UserExists");
  }

  agent::AgentProfile phone = agent::ephemeral_profile(testsupport::browser_key("phone"));
  agent::Agent b(phone, rec, r.clock.fn());
  CHECK(b.login(bank(), "alice", SecretString("pw-alice-1")).code == Code::StepUpRequired);
  auto events = cli.Get("/events");
  REQUIRE(events);
  const auto ev = nlohmann::json::parse(events->body);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0]["kind"] == "StepUpRequired");
  CHECK(ev[0]["user_id"] == "alice");
  CHECK(ev[0]["p_b"] == base64url_encode(b.browser_id().bytes()));

  laptop.perceived_origin_override = core::CanonicalOrigin::parse("https://bank-example.evil.example");
  CHECK(a.login(bank(), "alice", SecretString("pw-alice-1")).code == Code::UnknownPassword);
  laptop.perceived_origin_override.reset();

  // Status codes straight from the wire.
  const std::vector<std::pair<std::string, int>> raw = {
      {"not json", 400}, {"{}", 400}, {"[]", 400}, {R"({"version":1})", 400}};
  for (const auto& [payload, status] : raw) {
    auto res = cli.Post("/login" + kOriginQuery, payload, "application/json");
    REQUIRE(res);
    CHECK(res->status == status);
    CHECK(nlohmann::json::parse(res->body)["code"] == "BadRequest");
  }
  CHECK(cli.Post("/login?origin=nope", body, "application/json")->status == 400);

  // Challenge fetched for one origin, message posted at another.
  const auto grant = wire::grant_from_json(nlohmann::json::parse(cli.Get("/challenge" + kOriginQuery)->body));
  auto msg = a.build(wire::MessageType::Verify, grant.challenge, bank(), "alice", SecretString("pw-alice-1"));
  auto other = cli.Post("/login?origin=https%3A%2F%2Fother.example", wire::auth_message_to_json(msg).dump(),
                        "application/json");
  CHECK(other->status == 401);
  CHECK(nlohmann::json::parse(other->body)["code"] == "OriginMismatch");

  // Wrong endpoint for the message type.
  auto wrong = cli.Post("/change" + kOriginQuery, wire::auth_message_to_json(msg).dump(), "application/json");
  CHECK(wrong->status == 400);

  // A restarted service sees the persisted state.
  r.service.stop();
  server::AuthServer again(config_for(server::PolicyMode::HighSecurity), store);
  CHECK(again.snapshot() == r.server.snapshot());
}

TEST_CASE("change over HTTP", "[http]") {
  Running r(server::PolicyMode::Enterprise);
  agent::HttpLink link(r.url());
  agent::AgentProfile p = agent::ephemeral_profile(testsupport::browser_key("laptop"));
  agent::Agent a(p, link, r.clock.fn());
  REQUIRE(a.enrol_flow(bank(), "bob", SecretString("first-pass"), SecretString("first-pass")).code == Code::Enrolled);
  CHECK(a.change_flow(bank(), "bob", SecretString("first-pass"), SecretString("second-pass")).code ==
        Code::PasswordChanged);
  CHECK(a.login(bank(), "bob", SecretString("first-pass")).code == Code::UnknownPassword);
  CHECK(a.login(bank(), "bob", SecretString("second-pass")).code == Code::Accept);
}

TEST_CASE("static assets are served from the configured directory", "[http]") {
  TempDir dir;
  {
    std::ofstream(dir / "index.html") << "<!doctype html><title>demo</title>";
    std::ofstream(dir / "field.js") << "export const x = 1;";
  }
  http::ServiceOptions opts;
  opts.static_dir = dir.path();
  Running r(server::PolicyMode::Enterprise, {}, opts);
  auto cli = r.client();
  auto index = cli.Get("/");
  REQUIRE(index);
  CHECK(index->status == 200);
  CHECK(index->body.find("demo") != std::string::npos);
  auto js = cli.Get("/field.js");
  REQUIRE(js);
  CHECK(js->status == 200);
  CHECK(js->get_header_value("Content-Type").find("javascript") != std::string::npos);
  // API routes still win.
  CHECK(cli.Get("/challenge")->status == 200);

  server::AuthServer s(config_for(server::PolicyMode::Enterprise));
  http::ServiceOptions missing;
  missing.static_dir = dir / "nope";
  CHECK_THROWS(http::HttpService(s, missing));
}

TEST_CASE("property: service decisions equal in-process decisions", "[http][differential]") {
  // Same entropy and clock on both sides gives the same challenges.
  Running remote(server::PolicyMode::HighSecurity, {}, {}, seeded(99));
  server::AuthServer local(config_for(server::PolicyMode::HighSecurity), {}, seeded(99));
  auto cli = remote.client();
  const std::uint64_t now = remote.clock.now;

  testsupport::Gen g(5);
  agent::AgentProfile keys[2] = {agent::ephemeral_profile(testsupport::browser_key("k0")),
                                 agent::ephemeral_profile(testsupport::browser_key("k1"))};
  agent::InProcessLink unused(local);
  int compared = 0;
  std::optional<wire::AuthMessage> previous;
  for (int i = 0; i < 60; ++i) {
    const auto grant_remote = wire::grant_from_json(nlohmann::json::parse(cli.Get("/challenge" + kOriginQuery)->body));
    const auto grant_local = local.issue_challenge(bank(), now);
    REQUIRE(grant_remote == grant_local);

    const std::string user = "user" + std::to_string(g.below(4));
    const std::string pw = "password-" + std::to_string(g.below(2));
    agent::Agent a(keys[g.below(2)], unused, remote.clock.fn());
    const auto type = static_cast<wire::MessageType>(1 + g.below(3));
    auto msg = a.build(type, grant_local.challenge, bank(), user, SecretString(pw));
    if (type == wire::MessageType::Change) {
      msg.cred_new = a.build(type, grant_local.challenge, bank(), user, SecretString("password-" + std::to_string(g.below(2)))).cred;
    }
    switch (g.below(6)) {
      case 0: msg.cred.sigma_b.s[3] ^= 1; break;
      case 1:
        if (previous) msg = *previous;  // replay
        break;
      default: break;
    }
    previous = msg;

    const char* path = msg.type == wire::MessageType::Enrol ? "/enrol" : msg.type == wire::MessageType::Verify ? "/login" : "/change";
    auto res = cli.Post(std::string(path) + kOriginQuery, wire::auth_message_to_json(msg).dump(), "application/json");
    REQUIRE(res);
    server::Decision d;
    switch (msg.type) {
      case wire::MessageType::Enrol: d = local.enrol(msg, bank(), now); break;
      case wire::MessageType::Verify: d = local.verify(msg, bank(), now); break;
      case wire::MessageType::Change: d = local.change_password(msg, bank(), now); break;
    }
    CHECK(res->body == server::decision_to_json(d).dump());
    CHECK(res->status == server::http_status(d.code));
    ++compared;
  }
  CHECK(compared == 60);
  CHECK(remote.server.snapshot() == local.snapshot());
}

TEST_CASE("concurrent clients", "[http][concurrency]") {
  Running r(server::PolicyMode::Enterprise);
  constexpr int kClients = 8;
  std::atomic<int> accepted{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < kClients; ++i) {
    threads.emplace_back([&, i] {
      agent::HttpLink link(r.url());
      agent::AgentProfile p = agent::ephemeral_profile(testsupport::browser_key("b" + std::to_string(i)));
      agent::Agent a(p, link, r.clock.fn());
      const std::string user = "user" + std::to_string(i);
      if (a.enrol_flow(bank(), user, SecretString("pass-" + user), SecretString("pass-" + user)).code != Code::Enrolled) return;
      for (int k = 0; k < 5; ++k) {
        if (a.login(bank(), user, SecretString("pass-" + user)).code == Code::Accept) ++accepted;
      }
    });
  }
  for (auto& t : threads) t.join();
  CHECK(accepted == kClients * 5);
  CHECK(r.server.snapshot().users().size() == kClients);
}
