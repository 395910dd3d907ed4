#include "credfield/server/config.hpp"

#include <fstream>
#include <limits>

#include "credfield/core/error.hpp"

namespace credfield::server {

using nlohmann::json;

std::string_view to_string(PolicyMode mode) {
  switch (mode) {
    case PolicyMode::HighSecurity: return "HighSecurity";
    case PolicyMode::Enterprise: return "Enterprise";
    case PolicyMode::Personal: return "Personal";
  }
  return "Unknown";
}

std::string_view to_string(UnknownBrowserAction action) {
  switch (action) {
    case UnknownBrowserAction::StepUp: return "StepUp";
    case UnknownBrowserAction::AllowAndAlert: return "AllowAndAlert";
    case UnknownBrowserAction::AllowAndNotify: return "AllowAndNotify";
  }
  return "Unknown";
}

PolicyMode policy_mode_from_string(std::string_view name) {
  for (auto m : {PolicyMode::HighSecurity, PolicyMode::Enterprise, PolicyMode::Personal}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown policy mode '" + std::string(name) + "'");
}

UnknownBrowserAction unknown_browser_action_from_string(std::string_view name) {
  for (auto a : {UnknownBrowserAction::StepUp, UnknownBrowserAction::AllowAndAlert, UnknownBrowserAction::AllowAndNotify}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown browser action '" + std::string(name) + "'");
}

PolicyParams PolicyParams::defaults(PolicyMode mode) {
  PolicyParams p;
  p.mode = mode;
  switch (mode) {
    case PolicyMode::HighSecurity:
      p.history_cap = 5;
      p.unknown_browser_action = UnknownBrowserAction::StepUp;
      break;
    case PolicyMode::Enterprise:
      p.history_cap = 5;
      p.unknown_browser_action = UnknownBrowserAction::AllowAndAlert;
      break;
    case PolicyMode::Personal:
      p.history_cap = 10;
      p.unknown_browser_action = UnknownBrowserAction::AllowAndNotify;
      p.deny_shared_browsers = true;
      break;
  }
  return p;
}

void ServerConfig::validate() const {
  if (delta == 0) throw ConfigError("delta must be positive");
  if (challenge_ttl < delta) throw ConfigError("challenge_ttl must be at least delta");
  if (kdf.iterations == 0) throw ConfigError("iterations must be positive");
  if (policy.history_cap == 0) throw ConfigError("history_cap must be positive");
  if (policy.shared_browser_user_threshold < 2) throw ConfigError("shared_browser_user_threshold must be at least 2");
  try {
    core::CanonicalOrigin::parse(origin);
  } catch (const core::CoreError& e) {
    throw ConfigError(std::string("origin: ") + e.what());
  }
}

json config_to_json(const ServerConfig& cfg) {
  return json{
      {"delta", cfg.delta},
      {"skew", cfg.skew},
      {"challenge_ttl", cfg.challenge_ttl},
      {"iterations", cfg.kdf.iterations},
      {"origin", cfg.origin},
      {"policy",
       {
           {"mode", to_string(cfg.policy.mode)},
           {"history_cap", cfg.policy.history_cap},
           {"unknown_browser_action", to_string(cfg.policy.unknown_browser_action)},
           {"shared_browser_user_threshold", cfg.policy.shared_browser_user_threshold},
           {"blacklist_enforced", cfg.policy.blacklist_enforced},
           {"deny_shared_browsers", cfg.policy.deny_shared_browsers},
       }},
  };
}

namespace {

template <typename T>
void read_number(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_number_unsigned() || it->get<std::uint64_t>() > std::numeric_limits<T>::max()) {
    throw ConfigError(std::string(key) + " must be a non-negative integer in range");
  }
  out = static_cast<T>(it->get<std::uint64_t>());
}

void read_bool(const json& j, const char* key, bool& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_boolean()) throw ConfigError(std::string(key) + " must be a boolean");
  out = it->get<bool>();
}

std::optional<std::string> read_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) return std::nullopt;
  if (!it->is_string()) throw ConfigError(std::string(key) + " must be a string");
  return it->get<std::string>();
}

}  // namespace

ServerConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ServerConfig cfg;
  read_number(j, "delta", cfg.delta);
  read_number(j, "skew", cfg.skew);
  read_number(j, "challenge_ttl", cfg.challenge_ttl);
  read_number(j, "iterations", cfg.kdf.iterations);
  if (auto o = read_string(j, "origin")) cfg.origin = *o;

  if (auto it = j.find("policy"); it != j.end()) {
    if (!it->is_object()) throw ConfigError("policy must be an object");
    const json& p = *it;
    if (auto mode = read_string(p, "mode")) cfg.policy = PolicyParams::defaults(policy_mode_from_string(*mode));
    read_number(p, "history_cap", cfg.policy.history_cap);
    if (auto a = read_string(p, "unknown_browser_action")) {
      cfg.policy.unknown_browser_action = unknown_browser_action_from_string(*a);
    }
    read_number(p, "shared_browser_user_threshold", cfg.policy.shared_browser_user_threshold);
    read_bool(p, "blacklist_enforced", cfg.policy.blacklist_enforced);
    read_bool(p, "deny_shared_browsers", cfg.policy.deny_shared_browsers);
  }
  cfg.validate();
  return cfg;
}

ServerConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
  return config_from_json(j);
}

}  // namespace credfield::server
