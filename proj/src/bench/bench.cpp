#include "credfield/bench/bench.hpp"

#include <chrono>
#include <iomanip>
#include <map>
#include <sstream>

#include "credfield/agent/agent.hpp"
#include "credfield/core/kdf.hpp"
#include "credfield/server/auth_server.hpp"
#include "credfield/wire/sizes.hpp"

namespace credfield::bench {

namespace {

const std::string kUser = "uuuuu";  // same length as the size reference
const char* const kPassword = "bench password 1";

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

BenchReport finish(const BenchConfig& cfg, double total) {
  BenchReport r;
  r.protocol = cfg.protocol;
  r.n = cfg.n;
  r.total_seconds = total;
  r.per_auth_ms = total * 1000.0 / static_cast<double>(cfg.n);
  return r;
}

BenchReport run_proposed(const BenchConfig& cfg) {
  server::ServerConfig sc;
  sc.kdf = cfg.kdf;
  sc.policy = server::PolicyParams::defaults(server::PolicyMode::Enterprise);
  server::AuthServer server(sc);
  agent::InProcessLink link(server);
  agent::AgentProfile profile = agent::ephemeral_profile(core::generate_browser_key(core::system_entropy()));
  agent::Agent agent(profile, link, agent::system_clock(), cfg.kdf);
  const auto origin = server.default_origin();
  const SecretString password(kPassword);
  const auto enrolled = agent.enrol_flow(origin, kUser, password, password);
  if (enrolled.code != server::Code::Enrolled) {
    throw BenchAborted("enrolment failed: " + std::string(server::to_string(enrolled.code)));
  }

  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const auto d = agent.login(origin, kUser, password);
    if (d.code != server::Code::Accept) {
      throw BenchAborted("authentication " + std::to_string(i) + " failed: " + std::string(server::to_string(d.code)));
    }
  }
  BenchReport r = finish(cfg, seconds_since(start));
  const auto sizes = wire::measure_sizes();
  r.transmission_bytes = sizes.transmission_bytes;
  r.storage_bytes = sizes.storage_bytes_per_user;
  return r;
}

BenchReport run_hashed(const BenchConfig& cfg) {
  std::map<std::string, core::StoredIdentifier, std::less<>> store;
  const SecretString password(kPassword);
  store.emplace(kUser, baseline_store(kUser, baseline_derive(password), cfg.kdf));

  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const core::Digest sent = baseline_derive(password);
    const auto it = store.find(kUser);
    if (it == store.end() || !baseline_verify(kUser, sent, it->second, cfg.kdf)) {
      throw BenchAborted("baseline authentication " + std::to_string(i) + " failed");
    }
  }
  BenchReport r = finish(cfg, seconds_since(start));
  // u16 length + user id + digest on the wire; user id + PBKDF2 output at rest.
  r.transmission_bytes = 2 + kUser.size() + 32;
  r.storage_bytes = kUser.size() + core::KdfParams::kStoreBytes;
  return r;
}

}  // namespace

std::string_view to_string(Protocol p) {
  return p == Protocol::Proposed ? "Proposed" : "HashedPassword";
}

std::optional<Protocol> protocol_from_string(std::string_view name) {
  if (name == "Proposed") return Protocol::Proposed;
  if (name == "HashedPassword") return Protocol::HashedPassword;
  return std::nullopt;
}

BenchReport run_bench(const BenchConfig& cfg) {
  if (cfg.n == 0) throw std::invalid_argument("bench: n must be at least 1");
  return cfg.protocol == Protocol::Proposed ? run_proposed(cfg) : run_hashed(cfg);
}

core::Digest baseline_derive(const SecretString& password) { return core::sha256(password.bytes()); }

core::StoredIdentifier baseline_store(std::string_view user_id, const core::Digest& digest, const core::KdfParams& kdf) {
  const Bytes out = core::pbkdf2_hmac_sha512(digest, as_bytes(user_id), kdf.iterations, core::KdfParams::kStoreBytes);
  return core::StoredIdentifier::from_bytes(out);
}

bool baseline_verify(std::string_view user_id, const core::Digest& digest, const core::StoredIdentifier& stored,
                     const core::KdfParams& kdf) {
  const auto recomputed = baseline_store(user_id, digest, kdf);
  return equal_ct(recomputed.bytes(), stored.bytes());
}

std::optional<PublishedReference> published_reference(Protocol p) {
  if (p == Protocol::Proposed) {
    return PublishedReference{33.92, wire::kReferenceTransmissionBytes, wire::kReferenceStorageBytes};
  }
  return PublishedReference{12.99, 64, 1024};
}

nlohmann::json report_to_json(const BenchReport& r) {
  nlohmann::json j{{"protocol", to_string(r.protocol)},
                   {"n", r.n},
                   {"total_seconds", r.total_seconds},
                   {"per_auth_ms", r.per_auth_ms},
                   {"transmission_bytes", r.transmission_bytes},
                   {"storage_bytes", r.storage_bytes}};
  if (const auto ref = published_reference(r.protocol)) {
    j["reference"] = {{"total_seconds_for_1000", ref->total_seconds},
                      {"transmission_bytes", ref->transmission_bytes},
                      {"storage_bytes", ref->storage_bytes}};
  }
  return j;
}

std::string bench_table(const std::vector<BenchReport>& reports) {
  std::ostringstream out;
  out << std::fixed;
  auto header = [&](const BenchReport& r) {
    out << std::setw(18) << to_string(r.protocol) << std::setw(18) << "(reference)";
  };
  out << std::left << std::setw(30) << "Metric" << std::right;
  for (const auto& r : reports) header(r);
  out << "\n";

  auto row = [&](const char* name, auto measured, auto reference, int precision) {
    out << std::left << std::setw(30) << name << std::right << std::setprecision(precision);
    for (const auto& r : reports) {
      const auto ref = published_reference(r.protocol);
      out << std::setw(18) << measured(r) << std::setw(18) << (ref ? reference(*ref) : 0.0);
    }
    out << "\n";
  };
  row("Transmission (bytes)", [](const BenchReport& r) { return static_cast<double>(r.transmission_bytes); },
      [](const PublishedReference& p) { return static_cast<double>(p.transmission_bytes); }, 0);
  row("Storage per user (bytes)", [](const BenchReport& r) { return static_cast<double>(r.storage_bytes); },
      [](const PublishedReference& p) { return static_cast<double>(p.storage_bytes); }, 0);
  row("Time for 1,000 auths (s)", [](const BenchReport& r) { return r.per_auth_ms; },
      [](const PublishedReference& p) { return p.total_seconds; }, 3);
  row("Per authentication (ms)", [](const BenchReport& r) { return r.per_auth_ms; },
      [](const PublishedReference& p) { return p.total_seconds; }, 3);
  if (!reports.empty()) {
    out << "n = " << reports.front().n
        << "; reference timings are from different hardware and runtime, reference sizes from an unspecified "
           "encoding.\n";
  }
  return out.str();
}

}  // namespace credfield::bench
