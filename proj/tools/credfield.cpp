// Operator entry point: service, browser-side flows, attack scenarios,
// benchmarks and store maintenance.
//
// Exit codes: 0 success, 1 operational failure or rejection, 2 usage error.

#include <termios.h>
#include <unistd.h>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "credfield/agent/agent.hpp"
#include "credfield/attack/harness.hpp"
#include "credfield/bench/bench.hpp"
#include "credfield/core/error.hpp"
#include "credfield/http/service.hpp"
#include "credfield/server/store.hpp"
#include "credfield/wire/records.hpp"

using namespace credfield;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v != nullptr ? std::string(v) : fallback;
}

/// Reads one line from the terminal with echo off.
std::optional<std::string> prompt_secret(const std::string& label) {
  std::FILE* tty = std::fopen("/dev/tty", "r+");
  if (tty == nullptr) return std::nullopt;
  const int fd = ::fileno(tty);
  termios old{};
  const bool have_termios = ::tcgetattr(fd, &old) == 0;
  if (have_termios) {
    termios quiet = old;
    quiet.c_lflag &= ~static_cast<tcflag_t>(ECHO);
    ::tcsetattr(fd, TCSAFLUSH, &quiet);
  }
  std::fputs(label.c_str(), tty);
  std::fflush(tty);
  std::string line;
  for (int c = std::fgetc(tty); c != EOF && c != '\n'; c = std::fgetc(tty)) line.push_back(static_cast<char>(c));
  if (have_termios) ::tcsetattr(fd, TCSAFLUSH, &old);
  std::fputs("\n", tty);
  std::fclose(tty);
  return line;
}

/// From the environment variable, else the terminal.
SecretString read_secret(const char* env_name, const std::string& label) {
  if (const char* v = std::getenv(env_name)) return SecretString(std::string(v));
  if (auto line = prompt_secret(label)) return SecretString(std::move(*line));
  throw UsageError(std::string("no terminal to prompt on; set ") + env_name);
}

server::ServerConfig load_server_config(const std::string& config_path, const std::string& mode) {
  server::ServerConfig cfg = config_path.empty() ? server::ServerConfig{} : server::load_config(config_path);
  if (!mode.empty()) {
    const auto m = server::policy_mode_from_string(mode);
    cfg.policy = server::PolicyParams::defaults(m);
  }
  cfg.validate();
  return cfg;
}

core::CanonicalOrigin parse_origin(const std::string& raw) {
  try {
    return core::CanonicalOrigin::parse(raw);
  } catch (const core::CoreError& e) {
    throw UsageError("bad origin '" + raw + "': " + std::string(core::to_string(e.code())));
  }
}

int report_decision(const server::Decision& d, const core::StoredIdentifier& browser) {
  std::cout << server::to_string(d.code);
  if (!d.detail.empty()) std::cout << " (" << d.detail << ")";
  std::cout << (d.browser_known ? " browser=known" : "") << "\n";
  std::cout << "browser " << wire::encode_identifier(browser) << "\n";
  return d.ok() ? kOk : kFail;
}

volatile std::sig_atomic_t g_stop = 0;

// Options shared by every command that opens a server or a store.
struct ServerOpts {
  std::string config_path;
  std::string mode;
  std::string store = env_or("CREDFIELD_STORE", "");

  void add(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Server config JSON")->check(CLI::ExistingFile);
    cmd->add_option("--mode", mode, "Policy mode: HighSecurity, Enterprise, Personal");
    cmd->add_option("--store", store, "Credential store file (env CREDFIELD_STORE)");
  }
};

struct FlowOpts {
  std::string profile = "credfield.profile";
  std::string origin;
  std::string user;
  std::int64_t skew = 0;
  std::string spoof_origin;
  std::string server_url;

  void add(CLI::App* cmd) {
    cmd->add_option("--profile", profile, "Browser profile file (created on first use)");
    cmd->add_option("--origin", origin, "Origin the page is served from (default: server origin)");
    cmd->add_option("--user", user, "User id")->required();
    cmd->add_option("--skew", skew, "Seconds added to the browser clock");
    cmd->add_option("--spoof-origin", spoof_origin, "Origin the browser believes it is on");
    cmd->add_option("--server", server_url, "Remote service URL; in-process when omitted");
  }
};

enum class FlowKind { Enrol, Login, Change };

int run_flow(FlowKind kind, const FlowOpts& f, const ServerOpts& s) {
  const server::ServerConfig cfg = load_server_config(s.config_path, s.mode);
  const core::CanonicalOrigin origin = parse_origin(f.origin.empty() ? cfg.origin : f.origin);

  agent::AgentProfile profile = agent::open_profile(f.profile);
  profile.clock_skew = f.skew;
  if (!f.spoof_origin.empty()) profile.perceived_origin_override = parse_origin(f.spoof_origin);

  std::optional<server::AuthServer> local;
  std::unique_ptr<agent::ServerLink> link;
  if (f.server_url.empty()) {
    local.emplace(cfg, s.store);
    link = std::make_unique<agent::InProcessLink>(*local);
  } else {
    try {
      link = std::make_unique<agent::HttpLink>(f.server_url);
    } catch (const agent::TransportFailure& e) {
      throw UsageError(e.what());
    }
  }
  agent::Agent agent(profile, *link, agent::system_clock(), cfg.kdf);

  switch (kind) {
    case FlowKind::Enrol: {
      const SecretString pw = read_secret("CREDFIELD_PASSWORD", "Password: ");
      // Non-interactive callers may skip the repeat; it then equals the password.
      const char* repeat_env = std::getenv("CREDFIELD_PASSWORD_REPEAT");
      const char* pw_env = std::getenv("CREDFIELD_PASSWORD");
      const SecretString repeat = repeat_env == nullptr && pw_env != nullptr
                                      ? SecretString(std::string_view(pw_env))
                                      : read_secret("CREDFIELD_PASSWORD_REPEAT", "Repeat password: ");
      return report_decision(agent.enrol_flow(origin, f.user, pw, repeat), agent.browser_id());
    }
    case FlowKind::Login: {
      const SecretString pw = read_secret("CREDFIELD_PASSWORD", "Password: ");
      return report_decision(agent.login(origin, f.user, pw), agent.browser_id());
    }
    case FlowKind::Change: {
      const SecretString old_pw = read_secret("CREDFIELD_PASSWORD", "Current password: ");
      const SecretString new_pw = read_secret("CREDFIELD_NEW_PASSWORD", "New password: ");
      return report_decision(agent.change_flow(origin, f.user, old_pw, new_pw), agent.browser_id());
    }
  }
  return kUsage;
}

void write_json(const std::string& target, const nlohmann::json& j) {
  if (target.empty()) return;
  if (target == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(target);
  if (!out) throw std::runtime_error("cannot write " + target);
  out << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"credfield: phishing-resistant password credentials"};
  app.require_subcommand(1);

  ServerOpts server_opts;

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  http::ServiceOptions service_opts;
  service_opts.host = env_or("CREDFIELD_HOST", service_opts.host);
  std::string static_dir;
  server_opts.add(serve);
  serve->add_option("--host", service_opts.host, "Bind address");
  serve->add_option("--port", service_opts.port, "Port (0 picks one)")->check(CLI::Range(0, 65535));
  serve->add_option("--static-dir", static_dir, "Directory served at /")->check(CLI::ExistingDirectory);

  // flows
  FlowOpts flow_opts;
  auto* enrol = app.add_subcommand("enrol", "Enrol a user from this browser profile");
  auto* login = app.add_subcommand("login", "Log in from this browser profile");
  auto* change = app.add_subcommand("change", "Change a user's password");
  for (auto* cmd : {enrol, login, change}) {
    flow_opts.add(cmd);
    server_opts.add(cmd);
  }

  // attack
  auto* attack = app.add_subcommand("attack", "Run abuse-case scenarios");
  std::string scenario = "all";
  attack::ScenarioParams attack_params;
  bool no_integrity = false;
  std::string attack_json;
  attack->add_option("scenario", scenario, "Scenario name or 'all'");
  attack->add_option("--samples", attack_params.samples, "Attempts per strategy")->check(CLI::PositiveNumber);
  attack->add_option("--seed", attack_params.seed, "Random seed");
  attack->add_option("--replays", attack_params.replays, "Replays for ReplayCredentials")->check(CLI::PositiveNumber);
  attack->add_flag("--no-integrity", no_integrity, "Disable transport integrity for a single scenario");
  attack->add_option("--json", attack_json, "Write the JSON report to a file, or '-' for stdout");

  // bench
  auto* bench = app.add_subcommand("bench", "Time sequential authentications");
  std::string protocol = "all";
  std::size_t bench_n = 1000;
  std::string bench_json;
  bench->add_option("protocol", protocol, "Proposed, HashedPassword or 'all'");
  bench->add_option("-n", bench_n, "Authentications per protocol")->check(CLI::PositiveNumber);
  bench->add_option("--json", bench_json, "Write the JSON report to a file, or '-' for stdout");

  // store
  auto* store = app.add_subcommand("store", "Inspect the credential store");
  store->require_subcommand(1);
  auto* inspect = store->add_subcommand("inspect", "Summarize users, browsers and events");
  server_opts.add(inspect);

  // blacklist
  auto* blacklist = app.add_subcommand("blacklist", "Manage blacklisted browsers");
  blacklist->require_subcommand(1);
  auto* bl_add = blacklist->add_subcommand("add", "Blacklist a browser by its P_b (base64url)");
  std::string bl_id;
  bl_add->add_option("p_b", bl_id, "Browser identifier; put it after -- if it starts with -")->required();
  server_opts.add(bl_add);
  auto* bl_list = blacklist->add_subcommand("list", "List blacklisted browsers");
  server_opts.add(bl_list);

  // step-up confirmation, done by an operator after out-of-band checks
  auto* stepup = app.add_subcommand("stepup", "Resolve pending step-ups");
  stepup->require_subcommand(1);
  auto* su_confirm = stepup->add_subcommand("confirm", "Register a pending browser for a user");
  std::string su_user;
  std::string su_id;
  su_confirm->add_option("user", su_user, "User id")->required();
  su_confirm->add_option("p_b", su_id, "Browser identifier; put it after -- if it starts with -")->required();
  server_opts.add(su_confirm);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (serve->parsed()) {
      service_opts.static_dir = static_dir;
      server::AuthServer server(load_server_config(server_opts.config_path, server_opts.mode), server_opts.store);
      http::HttpService service(server, service_opts);
      const int port = service.bind();
      std::cout << "listening on http://" << service_opts.host << ":" << port << std::endl;
      std::signal(SIGINT, [](int) { g_stop = 1; });
      std::signal(SIGTERM, [](int) { g_stop = 1; });
      service.start();
      while (g_stop == 0) ::pause();
      service.stop();
      return kOk;
    }
    if (enrol->parsed()) return run_flow(FlowKind::Enrol, flow_opts, server_opts);
    if (login->parsed()) return run_flow(FlowKind::Login, flow_opts, server_opts);
    if (change->parsed()) return run_flow(FlowKind::Change, flow_opts, server_opts);

    if (attack->parsed()) {
      std::vector<attack::ScenarioReport> reports;
      bool ok = true;
      if (scenario == "all") {
        if (no_integrity) throw UsageError("--no-integrity applies to a single scenario");
        reports = attack::run_all(attack_params);
        for (const auto& r : reports) ok = ok && r.as_expected();
      } else {
        const auto id = attack::scenario_from_string(scenario);
        if (!id) throw UsageError("unknown scenario: " + scenario);
        attack_params.transport_integrity = !no_integrity;
        reports.push_back(attack::run_scenario(*id, attack_params));
        ok = reports.back().blocked;
      }
      std::cout << attack::summary_table(reports);
      for (const auto& r : reports) std::cout << "  " << attack::to_string(r.id) << ": " << r.notes << "\n";
      write_json(attack_json, attack::reports_to_json(reports));
      return ok ? kOk : kFail;
    }

    if (bench->parsed()) {
      std::vector<bench::Protocol> protocols;
      if (protocol == "all") {
        protocols = {bench::Protocol::Proposed, bench::Protocol::HashedPassword};
      } else if (auto p = bench::protocol_from_string(protocol)) {
        protocols = {*p};
      } else {
        throw UsageError("unknown protocol: " + protocol);
      }
      std::vector<bench::BenchReport> reports;
      nlohmann::json j = nlohmann::json::array();
      for (auto p : protocols) {
        reports.push_back(bench::run_bench(bench::BenchConfig{bench_n, p, {}}));
        j.push_back(bench::report_to_json(reports.back()));
      }
      std::cout << bench::bench_table(reports);
      if (reports.size() == 2) {
        std::cout << "ratio Proposed/HashedPassword: " << reports[0].total_seconds / reports[1].total_seconds << "\n";
      }
      write_json(bench_json, j);
      return kOk;
    }

    if (inspect->parsed() || bl_list->parsed() || bl_add->parsed() || su_confirm->parsed()) {
      if (server_opts.store.empty()) throw UsageError("--store or CREDFIELD_STORE is required");
      if (!std::filesystem::exists(server_opts.store)) {
        std::cerr << "error: no store at " << server_opts.store << "\n";
        return kFail;
      }
      if (bl_add->parsed() || su_confirm->parsed()) {
        const std::string& raw = bl_add->parsed() ? bl_id : su_id;
        core::StoredIdentifier id;
        try {
          id = wire::decode_identifier(raw);
        } catch (const wire::RecordError&) {
          throw UsageError("not a browser identifier: " + raw);
        }
        server::AuthServer server(load_server_config(server_opts.config_path, server_opts.mode), server_opts.store);
        if (bl_add->parsed()) {
          server.blacklist_browser(id);
          std::cout << "blacklisted " << raw << "\n";
          return kOk;
        }
        if (!server.confirm_step_up(su_user, id, agent::system_clock()())) {
          std::cerr << "error: no pending step-up for " << su_user << "\n";
          return kFail;
        }
        std::cout << "registered " << raw << " for " << su_user << "\n";
        return kOk;
      }
      const auto st = server::CredentialStore::load(server_opts.store);
      if (bl_list->parsed()) {
        for (const auto& id : st.blacklisted()) std::cout << wire::encode_identifier(id) << "\n";
        return kOk;
      }
      std::cout << "users " << st.users().size() << "\n";
      for (const auto& [id, u] : st.users()) {
        std::cout << "user " << id << " created " << u.created_at << " updated " << u.updated_at << " browsers "
                  << u.browsers.size() << "\n";
        for (const auto& b : u.browsers) {
          std::cout << "  browser " << wire::encode_identifier(b.p_b) << " first " << b.first_seen << " last "
                    << b.last_seen << " logins " << b.login_count << " shared-by " << st.browser_user_count(b.p_b)
                    << "\n";
        }
      }
      std::cout << "blacklisted " << st.blacklisted().size() << "\n";
      std::cout << "pending " << st.pending().size() << "\n";
      std::cout << "events " << st.events().size() << "\n";
      for (const auto& e : st.events()) {
        std::cout << "  " << server::to_string(e.kind) << " " << e.user_id << " " << wire::encode_identifier(e.p_b)
                  << " at " << e.at << "\n";
      }
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const server::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
