#include "credfield/attack/harness.hpp"

#include <algorithm>
#include <functional>
#include <iomanip>
#include <memory>
#include <random>
#include <sstream>

#include "credfield/agent/agent.hpp"
#include "credfield/server/auth_server.hpp"
#include "credfield/wire/codec.hpp"

namespace credfield::attack {

using agent::Agent;
using agent::AgentProfile;
using server::Code;
using server::Decision;
using server::PolicyMode;

namespace {

constexpr std::uint64_t kStartTime = 1700000000;
const char* const kAlphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

core::EntropySource seeded_entropy(std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return [rng](std::span<std::uint8_t> out) {
    for (auto& b : out) b = static_cast<std::uint8_t>((*rng)());
  };
}

const core::CanonicalOrigin& bank() {
  static const auto o = core::CanonicalOrigin::parse("https://bank.example");
  return o;
}

/// Fresh server and a victim browser, all on a controllable clock.
class Env {
 public:
  Env(PolicyMode mode, const ScenarioParams& p)
      : server_(config(mode), {}, seeded_entropy(p.seed)),
        link_(server_, clock()),
        keys_(seeded_entropy(p.seed * 0x9e3779b97f4a7c15ULL + 1)),
        victim_(agent::ephemeral_profile(core::generate_browser_key(keys_), kStartTime)),
        rng_(p.seed),
        password_(random_text(12, 20)) {}

  Env(const Env&) = delete;
  Env& operator=(const Env&) = delete;

  std::uint64_t now = kStartTime;
  agent::Clock clock() {
    return [this] { return now; };
  }

  server::AuthServer& server() { return server_; }
  agent::ServerLink& link() { return link_; }
  AgentProfile& victim_profile() { return victim_; }
  const std::string& password() const { return password_; }
  std::mt19937_64& rng() { return rng_; }

  Agent victim(agent::ServerLink& via) { return Agent(victim_, via, clock()); }
  Agent victim() { return victim(link_); }

  AgentProfile new_browser() { return agent::ephemeral_profile(core::generate_browser_key(keys_), now); }

  std::string random_text(std::size_t min_len, std::size_t max_len) {
    std::uniform_int_distribution<std::size_t> len(min_len, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, 61);
    std::string s(len(rng_), 'a');
    for (char& c : s) c = kAlphabet[pick(rng_)];
    return s;
  }

  void enrol_victim(const std::string& user) {
    const auto d = victim().enrol_flow(bank(), user, SecretString(password_), SecretString(password_));
    if (d.code != Code::Enrolled) throw HarnessMisconfigured("victim enrolment failed: " + std::string(to_string(d.code)));
  }

  /// The victim must still be able to log in, or a "blocked" result is vacuous.
  void control(const std::string& user) {
    const auto d = victim().login(bank(), user, SecretString(password_));
    if (d.code != Code::Accept) throw HarnessMisconfigured("control login failed: " + std::string(to_string(d.code)));
  }

  core::Challenge fresh_challenge() { return server_.issue_challenge(bank(), now).challenge; }

  /// Dictionary of `size` guesses that contains the true password once.
  std::vector<std::string> dictionary(std::size_t size) {
    std::vector<std::string> words;
    words.reserve(size);
    words.push_back(password_);
    while (words.size() < size) {
      auto w = random_text(8, 20);
      if (w != password_) words.push_back(std::move(w));
    }
    std::shuffle(words.begin(), words.end(), rng_);
    return words;
  }

 private:
  static server::ServerConfig config(PolicyMode mode) {
    server::ServerConfig cfg;
    cfg.policy = server::PolicyParams::defaults(mode);
    return cfg;
  }

  server::AuthServer server_;
  agent::InProcessLink link_;
  core::EntropySource keys_;
  AgentProfile victim_;
  std::mt19937_64 rng_;
  std::string password_;
};

/// Forwards challenge requests and keeps outbound messages for the adversary
/// instead of delivering them.
class InterceptLink : public agent::ServerLink {
 public:
  explicit InterceptLink(agent::ServerLink& inner) : inner_(inner) {}
  wire::ChallengeGrant challenge(const core::CanonicalOrigin& origin) override { return inner_.challenge(origin); }
  Decision send(const wire::AuthMessage& msg, const core::CanonicalOrigin&) override {
    captured.push_back(msg);
    return Decision::of(Code::TransportError, "intercepted");
  }
  std::vector<wire::AuthMessage> captured;

 private:
  agent::ServerLink& inner_;
};

/// Adversary-controlled hop that forwards what the victim sends.
class RelayLink : public agent::ServerLink {
 public:
  RelayLink(agent::ServerLink& inner, const core::CanonicalOrigin& real) : inner_(inner), real_(real) {}
  wire::ChallengeGrant challenge(const core::CanonicalOrigin&) override { return inner_.challenge(real_); }
  Decision send(const wire::AuthMessage& msg, const core::CanonicalOrigin&) override {
    captured.push_back(msg);
    return inner_.send(msg, real_);
  }
  std::vector<wire::AuthMessage> captured;

 private:
  agent::ServerLink& inner_;
  core::CanonicalOrigin real_;
};

/// Channel the adversary can rewrite. With integrity on, any rewrite is
/// detected and the message is dropped, as a TLS record would be.
class TamperingChannel : public agent::ServerLink {
 public:
  TamperingChannel(agent::ServerLink& inner, bool integrity, std::function<void(wire::AuthMessage&)> tamper)
      : inner_(inner), integrity_(integrity), tamper_(std::move(tamper)) {}
  wire::ChallengeGrant challenge(const core::CanonicalOrigin& origin) override { return inner_.challenge(origin); }
  Decision send(const wire::AuthMessage& msg, const core::CanonicalOrigin& origin) override {
    wire::AuthMessage forwarded = msg;
    tamper_(forwarded);
    if (integrity_ && wire::encode_auth_message(forwarded) != wire::encode_auth_message(msg)) {
      ++dropped;
      return Decision::of(Code::TransportError, "channel integrity check failed");
    }
    return inner_.send(forwarded, origin);
  }
  std::size_t dropped = 0;

 private:
  agent::ServerLink& inner_;
  bool integrity_;
  std::function<void(wire::AuthMessage&)> tamper_;
};

class Tally {
 public:
  Tally(ScenarioId id, bool integrity) {
    report_.id = id;
    report_.transport_integrity = integrity;
  }

  /// One adversary attempt; it succeeds when the server grants access.
  void attempt(const Decision& d) { attempt(d.code, d.ok()); }
  void attempt(Code code, bool success) {
    ++report_.attempts;
    ++report_.outcomes[std::string(server::to_string(code))];
    if (success) ++report_.successes_by_adversary;
  }

  ScenarioReport finish(std::string notes) {
    report_.blocked = report_.successes_by_adversary == 0;
    report_.notes = std::move(notes);
    return report_;
  }

 private:
  ScenarioReport report_;
};

void flip_bit(std::span<std::uint8_t> bytes, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pos(0, bytes.size() * 8 - 1);
  const std::size_t bit = pos(rng);
  bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
}

// Scenarios. Each runs on its own Env, ends with a control login where that
// makes sense, and counts an adversary success only for a granted access.

ScenarioReport spoofed_url_mitm(const ScenarioParams& p) {
  Env env(PolicyMode::Enterprise, p);
  const std::string user = "victim";
  env.enrol_victim(user);
  Tally tally(ScenarioId::SpoofedUrlMitm, p.transport_integrity);
  RelayLink relay(env.link(), bank());
  Agent victim = env.victim(relay);
  for (std::size_t i = 0; i < p.samples; ++i) {
    // The victim types the password into a page on a look-alike origin; the
    // phishing server relays the resulting message to the real one.
    const std::string host = "bank-example-" + env.random_text(4, 10) + ".evil.example";
    env.victim_profile().perceived_origin_override = core::CanonicalOrigin::parse("https://" + host);
    tally.attempt(victim.login(bank(), user, SecretString(env.password())));
    // Also try the captured credential against a challenge of its own.
    auto msg = relay.captured.back();
    msg.challenge = env.fresh_challenge();
    tally.attempt(env.server().verify(msg, bank(), env.now));
  }
  env.victim_profile().perceived_origin_override.reset();
  env.control(user);
  return tally.finish("credentials derived under a spoofed origin carry a different V_p");
}

ScenarioReport offline_brute_force(const ScenarioParams& p) {
  Env env(PolicyMode::HighSecurity, p);
  const std::string user = "victim";
  env.enrol_victim(user);
  Tally tally(ScenarioId::OfflineBruteForce, p.transport_integrity);

  agent::RecordingLink rec(env.link());
  Agent victim = env.victim(rec);
  if (victim.login(bank(), user, SecretString(env.password())).code != Code::Accept) {
    throw HarnessMisconfigured("harvest login failed");
  }
  const wire::AuthMessage harvested = rec.sent().back();

  // Offline: recompute sigma_p for every guess against the harvested challenge.
  std::vector<std::string> confirmed;
  const auto words = env.dictionary(p.dictionary_size);
  const core::Digest d_p = core::password_digest(harvested.challenge);
  for (const auto& guess : words) {
    const auto s_p = core::derive_password_scalar(SecretString(guess), bank(), user, core::KdfParams{});
    if (core::sign_deterministic(s_p, d_p) == harvested.cred.sigma_p) confirmed.push_back(guess);
  }

  // Online: every confirmed guess, plus unconfirmed ones, from the adversary's
  // own browser and with borrowed or forged browser signatures.
  AgentProfile own = env.new_browser();
  Agent adversary(own, env.link(), env.clock());
  std::vector<std::string> tries = confirmed;
  for (const auto& w : words) {
    if (tries.size() >= p.samples + confirmed.size()) break;
    if (std::find(confirmed.begin(), confirmed.end(), w) == confirmed.end()) tries.push_back(w);
  }
  for (const auto& guess : tries) {
    tally.attempt(adversary.login(bank(), user, SecretString(guess)));

    const auto challenge = env.fresh_challenge();
    const auto s_p = core::derive_password_scalar(SecretString(guess), bank(), user, core::KdfParams{});
    wire::AuthMessage forged = harvested;
    forged.challenge = challenge;
    forged.cred.browser_time = env.now;
    forged.cred.v_p = core::PublicKey::from_secret(s_p);
    forged.cred.sigma_p = core::sign_deterministic(s_p, core::password_digest(challenge));
    // Victim's V_b with the adversary's own sigma_b.
    forged.cred.sigma_b = core::sign_deterministic(own.browser_key, core::browser_digest(forged.cred.sigma_p, env.now));
    tally.attempt(env.server().verify(forged, bank(), env.now));

    // Victim's V_b with the harvested sigma_b.
    wire::AuthMessage reused = forged;
    reused.challenge = env.fresh_challenge();
    reused.cred.sigma_p = core::sign_deterministic(s_p, core::password_digest(reused.challenge));
    reused.cred.sigma_b = harvested.cred.sigma_b;
    tally.attempt(env.server().verify(reused, bank(), env.now));
  }
  env.control(user);
  std::ostringstream notes;
  notes << confirmed.size() << " of " << words.size()
        << " guesses matched sigma_p offline (the dictionary holds the true password); none was accepted without S_b";
  return tally.finish(notes.str());
}

ScenarioReport future_clock(const ScenarioParams& p) {
  Env env(PolicyMode::Enterprise, p);
  const std::string user = "victim";
  env.enrol_victim(user);
  Tally tally(ScenarioId::FutureClock, p.transport_integrity);
  InterceptLink intercept(env.link());
  Agent victim = env.victim(intercept);
  for (std::size_t i = 0; i < p.samples; ++i) {
    env.victim_profile().clock_skew = static_cast<std::int64_t>(p.future_skew);
    victim.login(bank(), user, SecretString(env.password()));
    env.victim_profile().clock_skew = 0;
    const wire::AuthMessage stolen = intercept.captured.back();

    // Half the time the adversary tries right away, when the timestamp is
    // still in the future (which burns the challenge). Otherwise it waits
    // for the date, by which time the challenge has expired. A fresh
    // challenge is never what sigma_p signed.
    if (i % 2 == 0) tally.attempt(env.server().verify(stolen, bank(), env.now));
    env.now += p.future_skew;
    tally.attempt(env.server().verify(stolen, bank(), env.now));
    wire::AuthMessage moved = stolen;
    moved.challenge = env.fresh_challenge();
    tally.attempt(env.server().verify(moved, bank(), env.now));
  }
  env.control(user);
  return tally.finish("future-dated credentials are bound to a challenge that is consumed or expired by then");
}

ScenarioReport keylogger_other_device(const ScenarioParams& p) {
  Env env(PolicyMode::HighSecurity, p);
  const std::string user = "victim";
  env.enrol_victim(user);
  Tally tally(ScenarioId::KeyloggerOtherDevice, p.transport_integrity);
  std::size_t step_ups = 0;
  for (std::size_t i = 0; i < p.samples; ++i) {
    AgentProfile other = env.new_browser();
    Agent adversary(other, env.link(), env.clock());
    const auto d = adversary.login(bank(), user, SecretString(env.password()));
    if (d.code == Code::StepUpRequired) ++step_ups;
    tally.attempt(d);
    env.now += 1;
  }
  env.control(user);
  return tally.finish(std::to_string(step_ups) + " attempts with the true password ended in StepUpRequired");
}

ScenarioReport harvest_and_forge(const ScenarioParams& p) {
  Env env(PolicyMode::Enterprise, p);
  const std::string user = "victim";
  env.enrol_victim(user);
  Tally tally(ScenarioId::HarvestAndForge, p.transport_integrity);

  agent::RecordingLink rec(env.link());
  Agent victim = env.victim(rec);
  for (std::size_t i = 0; i < p.samples; ++i) {
    if (victim.login(bank(), user, SecretString(env.password())).code != Code::Accept) {
      throw HarnessMisconfigured("harvest login failed");
    }
    env.now += 1;
  }
  const auto harvested = rec.sent();

  // Each mauling is applied to a message intercepted before delivery, so the
  // challenge is still live and only the signatures stand in the way.
  InterceptLink intercept(env.link());
  Agent live_victim = env.victim(intercept);
  std::uniform_int_distribution<std::size_t> pick(0, harvested.size() - 1);
  const std::vector<std::function<void(wire::AuthMessage&)>> maulings = {
      [&](wire::AuthMessage& m) { flip_bit(m.cred.sigma_p.s, env.rng()); },
      [&](wire::AuthMessage& m) { flip_bit(m.cred.sigma_b.r, env.rng()); },
      [&](wire::AuthMessage& m) { m.cred.sigma_p = core::mirror_s(m.cred.sigma_p); },
      [&](wire::AuthMessage& m) { m.cred.sigma_b = core::mirror_s(m.cred.sigma_b); },
      [&](wire::AuthMessage& m) { std::swap(m.cred.sigma_p, m.cred.sigma_b); },
      [&](wire::AuthMessage& m) { std::swap(m.cred.v_p, m.cred.v_b); },
      [&](wire::AuthMessage& m) { m.cred.browser_time -= 1; },
      [&](wire::AuthMessage& m) { m.cred.sigma_p = harvested[pick(env.rng())].cred.sigma_p; },
      [&](wire::AuthMessage& m) {
        const auto& h = harvested[pick(env.rng())];
        m.cred.sigma_b = h.cred.sigma_b;
        m.cred.browser_time = h.cred.browser_time;
      },
      [&](wire::AuthMessage& m) { m.cred = harvested[pick(env.rng())].cred; },
  };
  std::size_t undecodable = 0;
  for (std::size_t i = 0; i < p.samples; ++i) {
    for (const auto& maul : maulings) {
      live_victim.login(bank(), user, SecretString(env.password()));
      wire::AuthMessage m = intercept.captured.back();
      maul(m);
      tally.attempt(env.server().verify(m, bank(), env.now));
    }
    // Raw bit flip anywhere in the encoded message.
    live_victim.login(bank(), user, SecretString(env.password()));
    Bytes raw = wire::encode_auth_message(intercept.captured.back());
    flip_bit(raw, env.rng());
    const auto d = env.server().submit(raw, bank(), env.now);
    if (d.code == Code::BadRequest) ++undecodable;
    tally.attempt(d);
    env.now += 1;
  }
  env.control(user);
  return tally.finish(std::to_string(harvested.size()) + " harvested credentials; " + std::to_string(maulings.size() + 1) +
                      " mauling kinds; " + std::to_string(undecodable) + " raw flips failed to decode");
}

ScenarioReport stolen_server_store(const ScenarioParams& p) {
  Env env(PolicyMode::HighSecurity, p);
  const std::string user = "victim";
  env.enrol_victim(user);
  Tally tally(ScenarioId::StolenServerStore, p.transport_integrity);
  const server::CredentialStore stolen = env.server().snapshot();
  const server::UserRecord* record = stolen.find_user(user);
  if (record == nullptr) throw HarnessMisconfigured("victim record missing");

  // Guess the password against P_p.
  std::vector<std::string> recovered;
  for (const auto& guess : env.dictionary(p.dictionary_size)) {
    const auto v_p = core::password_public_key(SecretString(guess), bank(), user, core::KdfParams{});
    if (core::store_password_identifier(user, v_p, core::KdfParams{}) == record->p_p) recovered.push_back(guess);
  }
  AgentProfile own = env.new_browser();
  Agent adversary(own, env.link(), env.clock());
  for (const auto& pw : recovered) tally.attempt(adversary.login(bank(), user, SecretString(pw)));

  // Without a password: use the stored identifiers themselves as key material.
  for (std::size_t i = 0; i < p.samples; ++i) {
    const auto& source = (i % 2 == 0) ? record->p_p : record->browsers.front().p_b;
    Bytes material(source.bytes().begin() + static_cast<long>(i % 32), source.bytes().begin() + static_cast<long>(i % 32) + 32);
    material[0] &= 0x7f;  // keep it below the group order
    if (std::all_of(material.begin(), material.end(), [](std::uint8_t b) { return b == 0; })) material[31] = 1;
    const auto key = core::SecretScalar::from_bytes(material);
    const auto challenge = env.fresh_challenge();
    core::Credential cred{core::sign_deterministic(key, core::password_digest(challenge)),
                          core::Signature{},
                          core::PublicKey::from_secret(key),
                          core::PublicKey::from_secret(own.browser_key),
                          env.now};
    cred.sigma_b = core::sign_deterministic(own.browser_key, core::browser_digest(cred.sigma_p, env.now));
    const wire::AuthMessage msg{wire::kWireVersion, wire::MessageType::Verify, user, challenge, cred, std::nullopt};
    tally.attempt(env.server().verify(msg, bank(), env.now));
  }
  env.control(user);
  return tally.finish("P_p dictionary search recovered " + std::to_string(recovered.size()) +
                      " password(s) (the dictionary holds the true password); logins from a foreign browser were "
                      "not accepted");
}

ScenarioReport replay_credentials(const ScenarioParams& p) {
  if (p.replays == 0) throw HarnessMisconfigured("replays must be positive");
  Env env(PolicyMode::Enterprise, p);
  const std::string user = "victim";
  env.enrol_victim(user);
  Tally tally(ScenarioId::ReplayCredentials, p.transport_integrity);
  agent::RecordingLink rec(env.link());
  Agent victim = env.victim(rec);
  if (victim.login(bank(), user, SecretString(env.password())).code != Code::Accept) {
    throw HarnessMisconfigured("login to replay was not accepted");
  }
  const Bytes bytes = wire::encode_auth_message(rec.sent().back());
  for (std::size_t i = 0; i < p.replays; ++i) {
    tally.attempt(env.server().submit(bytes, bank(), env.now + i % 100));
  }
  env.control(user);
  return tally.finish("byte-exact resubmission of one accepted message");
}

ScenarioReport enrolment_substitution(const ScenarioParams& p) {
  Env env(PolicyMode::Enterprise, p);
  Tally tally(ScenarioId::EnrolmentSubstitution, p.transport_integrity);
  AgentProfile own = env.new_browser();
  Agent adversary(own, env.link(), env.clock());
  const std::string adversary_password = env.random_text(12, 20);

  // Enrolment: the credential being registered is replaced in transit.
  std::size_t enrol_successes = 0;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < p.samples; ++i) {
    const std::string user = "victim" + std::to_string(i);
    TamperingChannel channel(env.link(), p.transport_integrity, [&](wire::AuthMessage& m) {
      m.cred = adversary.build(m.type, m.challenge, bank(), m.user_id, SecretString(adversary_password)).cred;
    });
    Agent victim = env.victim(channel);
    victim.enrol_flow(bank(), user, SecretString(env.password()), SecretString(env.password()));
    dropped += channel.dropped;
    const auto d = adversary.login(bank(), user, SecretString(adversary_password));
    if (d.ok()) ++enrol_successes;
    tally.attempt(d);
  }

  // Password change: cred_new replaced. The new credential has to carry a
  // valid sigma_b under the enrolled V_b, which the adversary cannot make.
  const std::string user = "changer";
  env.enrol_victim(user);
  std::size_t change_successes = 0;
  for (std::size_t i = 0; i < p.samples; ++i) {
    const bool keep_vb = i % 2 == 1;
    TamperingChannel channel(env.link(), p.transport_integrity, [&](wire::AuthMessage& m) {
      if (!m.cred_new) return;
      auto fake = adversary.build(m.type, m.challenge, bank(), m.user_id, SecretString(adversary_password)).cred;
      if (keep_vb) fake.v_b = m.cred.v_b;
      m.cred_new = fake;
    });
    Agent victim = env.victim(channel);
    const std::string next = env.random_text(12, 20);
    victim.change_flow(bank(), user, SecretString(env.password()), SecretString(next));
    dropped += channel.dropped;
    const auto d = adversary.login(bank(), user, SecretString(adversary_password));
    if (d.ok()) ++change_successes;
    tally.attempt(d);
    env.now += 1;
  }
  env.control(user);
  std::ostringstream notes;
  notes << "transport integrity " << (p.transport_integrity ? "on" : "off") << ": enrolment substitution "
        << enrol_successes << "/" << p.samples << ", change substitution " << change_successes << "/" << p.samples
        << ", tampered messages dropped " << dropped;
  return tally.finish(notes.str());
}

}  // namespace

std::string_view to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::SpoofedUrlMitm: return "SpoofedUrlMitm";
    case ScenarioId::OfflineBruteForce: return "OfflineBruteForce";
    case ScenarioId::FutureClock: return "FutureClock";
    case ScenarioId::KeyloggerOtherDevice: return "KeyloggerOtherDevice";
    case ScenarioId::HarvestAndForge: return "HarvestAndForge";
    case ScenarioId::StolenServerStore: return "StolenServerStore";
    case ScenarioId::ReplayCredentials: return "ReplayCredentials";
    case ScenarioId::EnrolmentSubstitution: return "EnrolmentSubstitution";
  }
  return "Unknown";
}

const std::vector<ScenarioId>& all_scenarios() {
  static const std::vector<ScenarioId> ids = {
      ScenarioId::SpoofedUrlMitm,   ScenarioId::OfflineBruteForce, ScenarioId::FutureClock,
      ScenarioId::KeyloggerOtherDevice, ScenarioId::HarvestAndForge, ScenarioId::StolenServerStore,
      ScenarioId::ReplayCredentials, ScenarioId::EnrolmentSubstitution,
  };
  return ids;
}

std::optional<ScenarioId> scenario_from_string(std::string_view name) {
  for (auto id : all_scenarios()) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

std::string_view abuse_case(ScenarioId id) {
  switch (id) {
    case ScenarioId::SpoofedUrlMitm: return "phishing page relays credentials to the real site";
    case ScenarioId::OfflineBruteForce: return "dictionary attack on a stolen credential";
    case ScenarioId::FutureClock: return "victim clock set ahead to harvest future-dated credentials";
    case ScenarioId::KeyloggerOtherDevice: return "sniffed password used from another device";
    case ScenarioId::HarvestAndForge: return "many credentials harvested, signatures mauled";
    case ScenarioId::StolenServerStore: return "stored P_p/P_b stolen from the server";
    case ScenarioId::ReplayCredentials: return "captured credential replayed";
    case ScenarioId::EnrolmentSubstitution: return "new credential replaced in transit at enrolment/change";
  }
  return "";
}

bool ScenarioReport::as_expected() const {
  if (id == ScenarioId::EnrolmentSubstitution && !transport_integrity) return !blocked;
  return blocked;
}

ScenarioReport run_scenario(ScenarioId id, const ScenarioParams& params) {
  if (params.samples == 0) throw HarnessMisconfigured("samples must be positive");
  if (params.dictionary_size == 0) throw HarnessMisconfigured("dictionary must hold at least the true password");
  if (params.future_skew <= 30) throw HarnessMisconfigured("future skew must exceed the server's tolerance");
  switch (id) {
    case ScenarioId::SpoofedUrlMitm: return spoofed_url_mitm(params);
    case ScenarioId::OfflineBruteForce: return offline_brute_force(params);
    case ScenarioId::FutureClock: return future_clock(params);
    case ScenarioId::KeyloggerOtherDevice: return keylogger_other_device(params);
    case ScenarioId::HarvestAndForge: return harvest_and_forge(params);
    case ScenarioId::StolenServerStore: return stolen_server_store(params);
    case ScenarioId::ReplayCredentials: return replay_credentials(params);
    case ScenarioId::EnrolmentSubstitution: return enrolment_substitution(params);
  }
  throw HarnessMisconfigured("unknown scenario");
}

std::vector<ScenarioReport> run_all(const ScenarioParams& params) {
  std::vector<ScenarioReport> out;
  for (auto id : all_scenarios()) {
    if (id == ScenarioId::EnrolmentSubstitution) continue;
    out.push_back(run_scenario(id, params));
  }
  for (bool integrity : {false, true}) {
    ScenarioParams p = params;
    p.transport_integrity = integrity;
    out.push_back(run_scenario(ScenarioId::EnrolmentSubstitution, p));
  }
  return out;
}

nlohmann::json report_to_json(const ScenarioReport& r) {
  return nlohmann::json{{"id", to_string(r.id)},
                        {"abuse_case", abuse_case(r.id)},
                        {"attempts", r.attempts},
                        {"successes_by_adversary", r.successes_by_adversary},
                        {"blocked", r.blocked},
                        {"transport_integrity", r.transport_integrity},
                        {"as_expected", r.as_expected()},
                        {"outcomes", r.outcomes},
                        {"notes", r.notes}};
}

nlohmann::json reports_to_json(const std::vector<ScenarioReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) arr.push_back(report_to_json(r));
  return arr;
}

std::string summary_table(const std::vector<ScenarioReport>& reports) {
  std::ostringstream out;
  out << std::left << std::setw(32) << "Scenario" << std::setw(58) << "Abuse case" << std::right << std::setw(9)
      << "Attempts" << std::setw(11) << "Successes" << "  " << std::left << std::setw(16) << "Result"
      << "Expected\n";
  for (const auto& r : reports) {
    std::string name(to_string(r.id));
    if (r.id == ScenarioId::EnrolmentSubstitution) name += r.transport_integrity ? " (TLS)" : " (no TLS)";
    out << std::left << std::setw(32) << name << std::setw(58) << abuse_case(r.id) << std::right << std::setw(9)
        << r.attempts << std::setw(11) << r.successes_by_adversary << "  " << std::left << std::setw(16)
        << (r.blocked ? "No compromise" : "Compromised") << (r.as_expected() ? "yes" : "NO") << "\n";
  }
  return out.str();
}

}  // namespace credfield::attack
