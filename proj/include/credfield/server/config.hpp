#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "credfield/core/credential.hpp"

namespace credfield::server {

enum class PolicyMode { HighSecurity, Enterprise, Personal };

enum class UnknownBrowserAction { StepUp, AllowAndAlert, AllowAndNotify };

std::string_view to_string(PolicyMode mode);
std::string_view to_string(UnknownBrowserAction action);
/// Throws ConfigError on unknown names.
PolicyMode policy_mode_from_string(std::string_view name);
UnknownBrowserAction unknown_browser_action_from_string(std::string_view name);

struct PolicyParams {
  PolicyMode mode = PolicyMode::Enterprise;
  std::size_t history_cap = 5;
  UnknownBrowserAction unknown_browser_action = UnknownBrowserAction::AllowAndAlert;
  /// A P_b registered to at least this many distinct users is never "known".
  std::size_t shared_browser_user_threshold = 10;
  bool blacklist_enforced = true;
  /// Treat over-shared browsers like blacklisted ones instead of merely unknown.
  bool deny_shared_browsers = false;

  static PolicyParams defaults(PolicyMode mode);

  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ServerConfig {
  std::uint64_t delta = 120;
  std::uint64_t skew = 30;
  std::uint64_t challenge_ttl = 300;
  core::KdfParams kdf;
  PolicyParams policy = PolicyParams::defaults(PolicyMode::Enterprise);
  /// Origin this server accepts credentials for when the caller names none.
  std::string origin = "https://bank.example";

  core::TimeWindow window() const { return core::TimeWindow{delta, skew}; }

  /// Throws ConfigError.
  void validate() const;

  friend bool operator==(const ServerConfig&, const ServerConfig&) = default;
};

nlohmann::json config_to_json(const ServerConfig& cfg);
/// Missing keys keep their defaults; policy params default from "mode".
/// The result is validated. Throws ConfigError.
ServerConfig config_from_json(const nlohmann::json& j);
ServerConfig load_config(const std::filesystem::path& path);

}  // namespace credfield::server
