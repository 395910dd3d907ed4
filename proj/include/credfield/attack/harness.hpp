#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace credfield::attack {

enum class ScenarioId {
  SpoofedUrlMitm,
  OfflineBruteForce,
  FutureClock,
  KeyloggerOtherDevice,
  HarvestAndForge,
  StolenServerStore,
  ReplayCredentials,
  EnrolmentSubstitution,
};

std::string_view to_string(ScenarioId id);
std::optional<ScenarioId> scenario_from_string(std::string_view name);
const std::vector<ScenarioId>& all_scenarios();

/// Short description of the abuse case the scenario plays out.
std::string_view abuse_case(ScenarioId id);

struct ScenarioParams {
  std::uint64_t seed = 1;
  std::size_t samples = 32;           // adversary attempts per strategy
  std::size_t dictionary_size = 256;  // guesses, true password included
  std::size_t replays = 1000;
  std::uint64_t future_skew = 3600;   // seconds the victim clock is pushed ahead
  /// Models TLS: a channel with integrity drops tampered messages.
  bool transport_integrity = true;
};

class HarnessMisconfigured : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ScenarioReport {
  ScenarioId id{};
  std::size_t attempts = 0;
  std::size_t successes_by_adversary = 0;
  bool blocked = true;  // successes_by_adversary == 0
  bool transport_integrity = true;
  /// Decision codes the adversary's attempts ended with.
  std::map<std::string, std::size_t> outcomes;
  std::string notes;

  /// Whether the run matched the expectation: blocked, except substitution
  /// without transport integrity, which is expected to succeed.
  bool as_expected() const;
};

/// Runs one scenario on a fresh server with an enrolled victim.
/// Throws HarnessMisconfigured on unusable parameters.
ScenarioReport run_scenario(ScenarioId id, const ScenarioParams& params = {});

/// Every scenario with the given params, plus EnrolmentSubstitution under
/// both channel settings.
std::vector<ScenarioReport> run_all(const ScenarioParams& params = {});

nlohmann::json report_to_json(const ScenarioReport& r);
nlohmann::json reports_to_json(const std::vector<ScenarioReport>& reports);

/// Fixed-width table: scenario, abuse case, attempts, successes, result.
std::string summary_table(const std::vector<ScenarioReport>& reports);

}  // namespace credfield::attack
