// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "credfield/agent/agent.hpp"
#include "credfield/attack/harness.hpp"
#include "credfield/bench/bench.hpp"
#include "credfield/core/error.hpp"
#include "credfield/http/service.hpp"
#include "credfield/wire/json.hpp"
#include "oracle.hpp"
#include "support/fixtures.hpp"
#include "support/helpers.hpp"
#include "support/secrets.hpp"
#include "support/vectors.hpp"

using namespace credfield;
using server::Code;
using server::PolicyMode;
using testsupport::bank;
using testsupport::browser_key;

namespace {

using Seconds = std::chrono::duration<double>;

struct Result {
  bool pass = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && pass) {
      pass = false;
      detail = what;
    }
  }
};

// Everything that left a client or server during the run, for criterion 9.
struct Transcript {
  std::vector<std::string> items;
  testsupport::SecretSet secrets;

  void add(const std::string& s) { items.push_back(s); }
  void add(ByteView b) { items.emplace_back(b.begin(), b.end()); }
  void add_message(const wire::AuthMessage& m) {
    add(wire::encode_auth_message(m));
    add(wire::auth_message_to_json(m).dump());
  }
  void add_decision(const server::Decision& d) { add(server::decision_to_json(d).dump()); }
  void add_egress(const agent::Egress& e) {
    for (const auto& r : e.requests) add(r);
    for (const auto& r : e.responses) add(r);
  }
  void add_events(const std::vector<server::PolicyEvent>& events) {
    for (const auto& e : events) add(http::event_to_json(e).dump());
  }
};

Transcript g_transcript;

void add_password_secret(const std::string& pw, const core::CanonicalOrigin& origin, const std::string& user) {
  g_transcript.secrets.add_password(pw, origin, user);
}

core::StoredIdentifier p_b_of(const core::SecretScalar& key) {
  return core::store_browser_identifier(core::PublicKey::from_secret(key), core::KdfParams{});
}

core::SecretScalar fresh_key(const std::string& label) {
  auto k = browser_key(label);
  g_transcript.secrets.add_key(k);
  return k;
}

double elapsed(std::chrono::steady_clock::time_point since) {
  return Seconds(std::chrono::steady_clock::now() - since).count();
}

// 1. enrol, login, change, old rejects, new accepts, for 100 random pairs
Result round_trip() {
  Result r;
  const auto t0 = std::chrono::steady_clock::now();
  testsupport::TempDir dir;
  server::AuthServer server(testsupport::config_for(PolicyMode::Enterprise), dir / "store.txt");
  agent::InProcessLink inner(server);
  testsupport::Gen gen(101);
  std::size_t passed = 0;
  for (int i = 0; i < 100; ++i) {
    const std::string user = gen.user() + "#" + std::to_string(i);
    const std::string pw = gen.password();
    std::string new_pw = gen.password();
    if (new_pw == pw) new_pw += "!";
    add_password_secret(pw, bank(), user);
    add_password_secret(new_pw, bank(), user);

    agent::RecordingLink link(inner);
    agent::AgentProfile profile = agent::ephemeral_profile(fresh_key("round-trip-" + std::to_string(i)));
    agent::Agent a(profile, link);
    const bool ok = a.enrol_flow(bank(), user, SecretString(pw), SecretString(pw)).code == Code::Enrolled &&
                    a.login(bank(), user, SecretString(pw)).code == Code::Accept &&
                    a.change_flow(bank(), user, SecretString(pw), SecretString(new_pw)).code ==
                        Code::PasswordChanged &&
                    a.login(bank(), user, SecretString(pw)).code == Code::UnknownPassword &&
                    a.login(bank(), user, SecretString(new_pw)).code == Code::Accept;
    g_transcript.add_egress(link.egress());
    if (ok) ++passed;
  }
  g_transcript.add(testsupport::read_file(dir / "store.txt"));
  g_transcript.add_events(server.events());
  const double secs = elapsed(t0);
  r.require(passed == 100, std::to_string(passed) + "/100 pairs passed");
  r.require(secs < 60.0, "took " + std::to_string(secs) + " s");
  if (r.pass) r.detail = "100/100 pairs, " + std::to_string(secs) + " s";
  return r;
}

// 2. abuse suite, twice, with identical reports
Result abuse_suite() {
  Result r;
  const auto first = attack::run_all();
  const auto second = attack::run_all();
  r.require(attack::reports_to_json(first) == attack::reports_to_json(second), "reports differ between runs");
  std::size_t blocked = 0;
  for (const auto& rep : first) {
    const std::string name = std::string(attack::to_string(rep.id)) + (rep.transport_integrity ? "" : " (no integrity)");
    if (rep.id == attack::ScenarioId::EnrolmentSubstitution && !rep.transport_integrity) {
      r.require(!rep.blocked && rep.successes_by_adversary > 0, name + " did not succeed");
    } else {
      r.require(rep.blocked, name + " not blocked");
      if (rep.blocked) ++blocked;
    }
    r.require(rep.as_expected(), name + " not as expected");
  }
  r.require(first.size() == 9, "expected 9 reports");
  if (r.pass) {
    r.detail = std::to_string(blocked) + " blocked, substitution succeeds without integrity, deterministic over 2 runs";
  }
  return r;
}

// 3. byte-exact replay of an accepted message
Result replay() {
  Result r;
  server::AuthServer server(testsupport::config_for(PolicyMode::Enterprise));
  testsupport::Session s(server);
  const auto key = fresh_key("replay");
  add_password_secret("replay password 1", bank(), "victim");
  r.require(s.enrol("victim", "replay password 1", key).code == Code::Enrolled, "enrol failed");
  const auto msg = s.build(wire::MessageType::Verify, "victim", "replay password 1", key);
  const Bytes bytes = wire::encode_auth_message(msg);
  g_transcript.add_message(msg);
  const auto first = server.submit(bytes, bank(), s.now());
  r.require(first.code == Code::Accept, "original not accepted");
  std::size_t accepts = 0;
  for (int i = 0; i < 1000; ++i) {
    s.advance(i % 3 == 0 ? 1 : 0);
    const auto d = server.submit(bytes, bank(), s.now());
    if (d.code == Code::Accept) ++accepts;
    if (i < 3) g_transcript.add_decision(d);
  }
  r.require(accepts == 0, std::to_string(accepts) + " replays accepted");
  if (r.pass) r.detail = "0/1000 replays accepted";
  return r;
}

std::string spoofed_origin(testsupport::Gen& gen) {
  switch (gen.below(6)) {
    case 0: return "https://" + gen.host();
    case 1: return "https://bank.example." + gen.host();
    case 2: return "http://bank.example";
    case 3: return "https://bank.example:" + std::to_string(1 + gen.below(65535));
    case 4: return "https://" + gen.text(1, 6, "abcdefghijklmnopqrstuvwxyz0123456789") + ".bank.example";
    default: return "http://" + gen.host() + ":" + std::to_string(1 + gen.below(65535));
  }
}

// 4. credentials made under a spoofed origin fail at the true origin
Result origin_binding() {
  Result r;
  server::AuthServer server(testsupport::config_for(PolicyMode::Enterprise));
  testsupport::Session s(server);
  testsupport::Gen gen(404);
  std::size_t rejected = 0;
  std::size_t trials = 0;
  while (trials < 1000) {
    const auto spoof = core::CanonicalOrigin::parse(spoofed_origin(gen));
    if (spoof == bank()) continue;  // ports 443 collapse to the true origin
    ++trials;
    const std::string user = "u" + std::to_string(trials) + gen.user();
    const std::string pw = gen.password();
    const auto key = browser_key("origin-" + std::to_string(trials));
    r.require(s.enrol(user, pw, key).code == Code::Enrolled, "enrol failed");
    const auto msg = s.build(wire::MessageType::Verify, user, pw, key, spoof);
    const auto d = server.verify(msg, bank(), s.now());
    if (d.code == Code::UnknownPassword) ++rejected;
    if (trials <= 20) {
      // secrets for a sample; the scan in criterion 9 covers these messages
      g_transcript.secrets.add_key(key);
      add_password_secret(pw, bank(), user);
      add_password_secret(pw, spoof, user);
      g_transcript.add_message(msg);
      g_transcript.add_decision(d);
    }
  }
  r.require(rejected == 1000, std::to_string(rejected) + "/1000 rejected");
  if (r.pass) r.detail = "1000/1000 spoofed-origin credentials rejected (UnknownPassword)";
  return r;
}

// 5. frozen oracle vectors plus live oracle on random inputs
Result oracle_equivalence() {
  Result r;
  const auto& v = testsupport::vectors();
  const core::KdfParams kdf{};
  r.require(v.at("iterations") == 1000 && kdf.iterations == 1000, "iterations are not 1000");

  std::size_t scalars = 0;
  for (const auto& c : v.at("password_scalar")) {
    const auto s = core::derive_password_scalar(SecretString(c["password"].get<std::string>()),
                                                core::CanonicalOrigin::parse(c["origin"].get<std::string>()),
                                                c["user_id"].get<std::string>(), kdf);
    if (to_hex(s.reveal()) == c["scalar"].get<std::string>()) ++scalars;
    else r.require(false, "password_scalar mismatch");
  }
  std::size_t stores = 0;
  for (const auto& c : v.at("store_identifier")) {
    const auto pub = core::PublicKey::from_compressed(from_hex(c["v"].get<std::string>()));
    if (pub && to_hex(core::store_identifier(from_hex(c["salt"].get<std::string>()), *pub, kdf).bytes()) ==
                   c["p"].get<std::string>()) {
      ++stores;
    } else {
      r.require(false, "store_identifier mismatch");
    }
  }
  std::size_t sigs = 0;
  for (const auto& c : v.at("sign_deterministic")) {
    const auto key = testsupport::scalar_from_hex(c["key"].get<std::string>());
    const auto digest = to_array<32>(from_hex(c["digest"].get<std::string>()));
    if (to_hex(core::sign_deterministic(key, digest).compact()) == c["signature"].get<std::string>()) ++sigs;
    else r.require(false, "sign_deterministic mismatch");
  }
  r.require(scalars >= 10 && stores >= 10 && sigs >= 10, "fewer than 10 vectors in a group");

  // live oracle on fresh random inputs
  testsupport::Gen gen(505);
  std::size_t live = 0;
  for (int i = 0; i < 10; ++i) {
    const std::string user = gen.user();
    const std::string pw = gen.password();
    const std::string origin = "https://" + gen.host();
    const auto s = core::derive_password_scalar(SecretString(pw), core::CanonicalOrigin::parse(origin), user, kdf);
    const bool scalar_ok = to_hex(s.reveal()) == oracle::to_hex(oracle::to_be(oracle::password_scalar(pw, origin, user, 1000), 32));

    const auto pub = core::PublicKey::from_secret(s);
    const Bytes salt = gen.bytes(gen.below(20));
    const bool store_ok = to_hex(core::store_identifier(salt, pub, kdf).bytes()) ==
                          oracle::to_hex(oracle::store_identifier(salt, Bytes(pub.bytes().begin(), pub.bytes().end()), 1000));

    const Bytes digest = gen.bytes(32);
    const bool sig_ok = to_hex(core::sign_deterministic(s, to_array<32>(digest)).compact()) ==
                        oracle::to_hex(oracle::ecdsa_sign(oracle::from_be(Bytes(s.reveal().begin(), s.reveal().end())), digest));
    if (scalar_ok && store_ok && sig_ok) ++live;
  }
  r.require(live == 10, std::to_string(live) + "/10 live oracle cases agree");
  if (r.pass) {
    r.detail = "frozen " + std::to_string(scalars) + "/" + std::to_string(stores) + "/" + std::to_string(sigs) +
               " (scalar/store/sign), live 10/10";
  }
  return r;
}

// Hands out a fixed challenge and accepts whatever it is sent.
class FixedLink : public agent::ServerLink {
 public:
  explicit FixedLink(core::Challenge c) : challenge_(c) {}
  wire::ChallengeGrant challenge(const core::CanonicalOrigin&) override { return {challenge_, 0}; }
  server::Decision send(const wire::AuthMessage&, const core::CanonicalOrigin&) override {
    return server::Decision::of(Code::Accept);
  }

 private:
  core::Challenge challenge_;
};

// 6. the fixed derive vectors reproduce across runs and through the agent
Result determinism() {
  Result r;
  const auto& cases = testsupport::vectors().at("derive");
  std::size_t checked = 0;
  for (int run = 0; run < 3; ++run) {
    for (const auto& c : cases) {
      const auto cred = core::derive(c["user_id"].get<std::string>(),
                                     testsupport::challenge_from_hex(c["challenge"].get<std::string>()),
                                     SecretString(c["password"].get<std::string>()),
                                     core::CanonicalOrigin::parse(c["origin"].get<std::string>()),
                                     c["browser_time"].get<std::uint64_t>(),
                                     testsupport::scalar_from_hex(c["browser_key"].get<std::string>()), core::KdfParams{});
      r.require(to_hex(wire::encode_credential(cred)) == c["credential"].get<std::string>(),
                "derive differs from the frozen vector on run " + std::to_string(run));
      ++checked;
    }
  }
  std::size_t transcripts = 0;
  for (const auto& c : cases) {
    const std::uint64_t t = c["browser_time"].get<std::uint64_t>();
    FixedLink fixed(testsupport::challenge_from_hex(c["challenge"].get<std::string>()));
    agent::RecordingLink rec(fixed);
    auto profile = agent::ephemeral_profile(testsupport::scalar_from_hex(c["browser_key"].get<std::string>()));
    agent::Agent a(profile, rec, [t] { return t; });
    a.login(core::CanonicalOrigin::parse(c["origin"].get<std::string>()), c["user_id"].get<std::string>(),
            SecretString(c["password"].get<std::string>()));
    const auto sent = rec.sent();
    const auto egress = rec.egress();
    const auto blob = from_hex(c["credential"].get<std::string>());
    bool in_wire = false;
    for (const auto& req : egress.requests) in_wire = in_wire || testsupport::contains(req, blob);
    if (sent.size() == 1 && to_hex(wire::encode_credential(sent[0].cred)) == c["credential"].get<std::string>() &&
        in_wire) {
      ++transcripts;
    }
  }
  r.require(transcripts == cases.size(), "agent transcript differs from the vector");
  if (r.pass) {
    r.detail = std::to_string(cases.size()) + " vectors x 3 runs, " + std::to_string(transcripts) +
               " agent transcripts byte-identical";
  }
  return r;
}

// 7. benchmark shape
Result bench_shape() {
  Result r;
  const auto proposed = bench::run_bench(bench::BenchConfig{1000, bench::Protocol::Proposed, {}});
  const auto hashed = bench::run_bench(bench::BenchConfig{1000, bench::Protocol::HashedPassword, {}});
  const double ratio = proposed.total_seconds / hashed.total_seconds;
  r.require(proposed.per_auth_ms < 100.0, "per-auth " + std::to_string(proposed.per_auth_ms) + " ms");
  r.require(ratio >= 1.5 && ratio <= 5.0, "ratio " + std::to_string(ratio));
  r.require(proposed.transmission_bytes <= 512, "transmission " + std::to_string(proposed.transmission_bytes));
  r.require(proposed.storage_bytes <= 2048, "storage " + std::to_string(proposed.storage_bytes));
  std::ostringstream d;
  d << "1000 auths " << proposed.total_seconds << " s (" << proposed.per_auth_ms << " ms each), ratio " << ratio
    << ", " << proposed.transmission_bytes << " B sent, " << proposed.storage_bytes << " B stored per user";
  if (r.pass) r.detail = d.str();
  else r.detail += "; " + d.str();
  return r;
}

// 8. policy engine
Result policy() {
  Result r;
  const auto home = browser_key("policy-home");
  const auto other = browser_key("policy-other");
  g_transcript.secrets.add_key(home);
  g_transcript.secrets.add_key(other);
  add_password_secret("policy password", bank(), "pat");
  const auto record = [&](const server::Decision& d) {
    g_transcript.add_decision(d);
    return d;
  };

  {
    server::AuthServer hs(testsupport::config_for(PolicyMode::HighSecurity));
    testsupport::Session s(hs);
    s.enrol("pat", "policy password", home);
    r.require(record(s.login("pat", "policy password", other)).code == Code::StepUpRequired,
              "HighSecurity unknown browser not stepped up");
    g_transcript.add_events(hs.events());
  }
  {
    server::AuthServer ent(testsupport::config_for(PolicyMode::Enterprise));
    testsupport::Session s(ent);
    s.enrol("pat", "policy password", home);
    const auto d = record(s.login("pat", "policy password", other));
    const auto events = ent.events();
    r.require(d.code == Code::Accept && !events.empty() && events.back().kind == server::EventKind::UnknownBrowserAlert,
              "Enterprise unknown browser not accepted with alert");
    g_transcript.add_events(events);
  }
  {
    server::AuthServer per(testsupport::config_for(PolicyMode::Personal));
    testsupport::Session s(per);
    s.enrol("pat", "policy password", home);
    per.blacklist_browser(p_b_of(home));
    const auto d = record(s.login("pat", "policy password", home));
    r.require(d.code == Code::BlacklistDenied && !d.ok(), "Personal blacklisted browser not rejected");
  }

  // caps: 15 distinct browsers per user, checked after every login
  for (auto [mode, cap] : {std::pair{PolicyMode::HighSecurity, 5u}, {PolicyMode::Enterprise, 5u},
                           {PolicyMode::Personal, 10u}}) {
    server::AuthServer srv(testsupport::config_for(mode));
    testsupport::Session s(srv);
    s.enrol("capped", "policy password", browser_key("cap-0"));
    std::size_t max_seen = 0;
    for (int i = 1; i <= 15; ++i) {
      s.advance(1);
      const auto key = browser_key("cap-" + std::to_string(i));
      if (s.login("capped", "policy password", key).code == Code::StepUpRequired) {
        srv.confirm_step_up("capped", p_b_of(key), s.now());
      }
      max_seen = std::max(max_seen, srv.user("capped")->browsers.size());
    }
    r.require(max_seen == cap, std::string(server::to_string(mode)) + " history reached " + std::to_string(max_seen));
  }

  // shared profile: 12 users on one browser
  const auto kiosk = browser_key("policy-kiosk");
  for (auto mode : {PolicyMode::HighSecurity, PolicyMode::Enterprise, PolicyMode::Personal}) {
    server::AuthServer srv(testsupport::config_for(mode));
    testsupport::Session s(srv);
    for (int i = 0; i < 12; ++i) {
      const std::string u = "shared" + std::to_string(i);
      const auto c = s.enrol(u, "pw-" + u, kiosk).code;
      const bool expect_denied = mode == PolicyMode::Personal && i >= 10;
      r.require(c == (expect_denied ? Code::BlacklistDenied : Code::Enrolled), "shared enrol " + u);
    }
    const auto d = s.login("shared0", "pw-shared0", kiosk);
    const Code want = mode == PolicyMode::HighSecurity ? Code::StepUpRequired
                      : mode == PolicyMode::Enterprise ? Code::Accept
                                                       : Code::BlacklistDenied;
    r.require(d.code == want && !d.browser_known,
              std::string(server::to_string(mode)) + " shared browser treated as known");
    r.require(srv.snapshot().browser_user_count(p_b_of(kiosk)) >= 10, "shared count below threshold");
  }
  if (r.pass) {
    r.detail = "step-up / alert / blacklist per mode, caps 5/5/10 held over 15 browsers, 12-user shared profile excluded";
  }
  return r;
}

std::string run_cli(const std::filesystem::path& dir, const std::string& args, int& status) {
  const std::string cmd = "cd '" + dir.string() + "' && setsid '" CREDFIELD_CLI "' " + args + " </dev/null 2>&1";
  std::string out;
  std::FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) return out;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) out.append(buf, n);
  const int raw = ::pclose(pipe);
  status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return out;
}

// 9. no secret in wire bytes, logs or error strings
Result no_secret_egress() {
  Result r;
  auto& t = g_transcript;

  // HTTP wire traffic, both directions
  {
    testsupport::TempDir dir;
    server::AuthServer srv(testsupport::config_for(PolicyMode::Enterprise), dir / "store.txt");
    http::ServiceOptions opts;
    opts.port = 0;
    http::HttpService service(srv, opts);
    service.start();
    agent::HttpLink http("http://127.0.0.1:" + std::to_string(service.port()));
    agent::RecordingLink link(http);
    auto profile = agent::ephemeral_profile(fresh_key("egress-http"));
    agent::Agent a(profile, link);
    add_password_secret("http secret pw", bank(), "carol");
    add_password_secret("http new secret", bank(), "carol");
    a.enrol_flow(bank(), "carol", SecretString("http secret pw"), SecretString("http secret pw"));
    a.login(bank(), "carol", SecretString("http secret pw"));
    a.login(bank(), "carol", SecretString("http wrong pw"));
    add_password_secret("http wrong pw", bank(), "carol");
    a.change_flow(bank(), "carol", SecretString("http secret pw"), SecretString("http new secret"));
    profile.perceived_origin_override = core::CanonicalOrigin::parse("https://bank.example.evil");
    add_password_secret("http new secret", *profile.perceived_origin_override, "carol");
    a.login(bank(), "carol", SecretString("http new secret"));
    t.add_egress(link.egress());
    t.add_events(srv.events());
    service.stop();
    t.add(testsupport::read_file(dir / "store.txt"));
  }

  // error strings
  const auto capture = [&](const std::function<void()>& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      t.add(std::string(e.what()));
    }
  };
  capture([] { core::derive_password_scalar(SecretString(""), bank(), "u", {}); });
  capture([] { core::build_salt(bank(), ""); });
  capture([] { core::CanonicalOrigin::parse("ftp://bank.example"); });
  {
    server::AuthServer srv(testsupport::config_for(PolicyMode::Enterprise));
    testsupport::Session s(srv);
    const auto key = fresh_key("egress-errors");
    add_password_secret("error path pw", bank(), "dave");
    s.enrol("dave", "error path pw", key);
    Bytes msg = wire::encode_auth_message(s.build(wire::MessageType::Verify, "dave", "error path pw", key));
    Bytes truncated(msg.begin(), msg.end() - 7);
    capture([&] { wire::decode_auth_message(truncated); });
    t.add_decision(srv.submit(truncated, bank(), s.now()));
    msg[50] ^= 0x01;
    t.add_decision(srv.submit(msg, bank(), s.now()));
    capture([&] { wire::auth_message_from_json_text("{\"user_id\": 3}"); });
  }
  {
    testsupport::TempDir dir;
    const auto p = agent::open_profile(dir / "profile");
    t.secrets.add_key(p.browser_key);
    std::string text = testsupport::read_file(dir / "profile");
    std::ofstream(dir / "profile", std::ios::trunc) << text << "junk trailing line\n";
    capture([&] { agent::open_profile(dir / "profile"); });
    std::ofstream(dir / "profile", std::ios::trunc) << text.substr(0, text.size() - 3);
    capture([&] { agent::open_profile(dir / "profile"); });
  }

  // CLI output, the closest thing to logs
  {
    testsupport::TempDir dir;
    ::setenv("CREDFIELD_STORE", (dir / "store.txt").c_str(), 1);
    ::setenv("CREDFIELD_PASSWORD", "cli secret password", 1);
    add_password_secret("cli secret password", bank(), "erin");
    add_password_secret("cli secret password", core::CanonicalOrigin::parse("https://bank.example.evil"), "erin");
    int status = -1;
    t.add(run_cli(dir.path(), "enrol --user erin --profile p", status));
    r.require(status == 0, "cli enrol failed");
    t.add(run_cli(dir.path(), "login --user erin --profile p", status));
    t.add(run_cli(dir.path(), "login --user erin --profile p --spoof-origin https://bank.example.evil", status));
    t.add(run_cli(dir.path(), "store inspect", status));
    ::unsetenv("CREDFIELD_PASSWORD");
    t.add(run_cli(dir.path(), "login --user erin --profile p", status));
    ::unsetenv("CREDFIELD_STORE");
    t.secrets.add_key(agent::open_profile(dir / "p").browser_key);
  }

  // positive control: the scanner must see a planted secret
  {
    testsupport::SecretSet control;
    const auto k = browser_key("control");
    control.add_key(k);
    r.require(!control.find_in(std::string("prefix ") + base64url_encode(k.reveal()) + " suffix").empty(),
              "scanner missed a planted secret");
  }

  std::size_t bytes = 0;
  for (const auto& item : t.items) {
    bytes += item.size();
    const std::string hit = t.secrets.find_in(item);
    r.require(hit.empty(), "secret " + hit + " found in output");
  }
  r.require(t.items.size() > 1000, "transcript unexpectedly small");
  if (r.pass) {
    r.detail = std::to_string(t.items.size()) + " items, " + std::to_string(bytes) + " bytes scanned against " +
               std::to_string(t.secrets.size()) + " secret patterns, 0 hits";
  }
  return r;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Result()> fn;
  };
  const std::vector<Criterion> criteria{
      {1, "protocol round-trip", round_trip},
      {2, "abuse suite", abuse_suite},
      {3, "replay", replay},
      {4, "origin binding", origin_binding},
      {5, "KDF/signature oracle equivalence", oracle_equivalence},
      {6, "determinism", determinism},
      {7, "benchmark shape", bench_shape},
      {8, "policy engine", policy},
      // last, so it scans what the others produced
      {9, "no secret egress", no_secret_egress},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Result res;
    try {
      res = c.fn();
    } catch (const std::exception& e) {
      res = Result{false, std::string("exception: ") + e.what()};
    }
    if (!res.pass) ++failures;
    std::cout << (res.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << res.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
