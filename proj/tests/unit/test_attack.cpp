#include <catch_amalgamated.hpp>

#include "credfield/attack/harness.hpp"

using namespace credfield::attack;

namespace {

const std::vector<ScenarioReport>& default_run() {
  static const std::vector<ScenarioReport> reports = run_all();
  return reports;
}

const ScenarioReport& find(ScenarioId id, bool integrity = true) {
  for (const auto& r : default_run()) {
    if (r.id == id && r.transport_integrity == integrity) return r;
  }
  throw std::logic_error("missing report");
}

}  // namespace

TEST_CASE("scenario names round-trip", "[attack]") {
  CHECK(all_scenarios().size() == 8);
  for (auto id : all_scenarios()) {
    CHECK(scenario_from_string(to_string(id)) == id);
    CHECK_FALSE(abuse_case(id).empty());
  }
  CHECK_FALSE(scenario_from_string("Teleport").has_value());
}

TEST_CASE("every no-compromise scenario is blocked", "[attack]") {
  for (auto id : all_scenarios()) {
    if (id == ScenarioId::EnrolmentSubstitution) continue;
    const auto& r = find(id);
    INFO(to_string(id) << ": " << r.notes);
    CHECK(r.attempts > 0);
    CHECK(r.successes_by_adversary == 0);
    CHECK(r.blocked);
    CHECK(r.as_expected());
  }
}

TEST_CASE("scenario outcomes come from the intended checks", "[attack]") {
  const auto& mitm = find(ScenarioId::SpoofedUrlMitm);
  CHECK(mitm.outcomes.at("UnknownPassword") == mitm.attempts);

  const auto& keylog = find(ScenarioId::KeyloggerOtherDevice);
  CHECK(keylog.outcomes.at("StepUpRequired") == keylog.attempts);

  const auto& future = find(ScenarioId::FutureClock);
  CHECK(future.outcomes.at("FutureTimestamp") == 16);
  CHECK(future.outcomes.at("AlreadyConsumed") == 16);
  CHECK(future.outcomes.at("ChallengeExpired") == 16);
  CHECK(future.outcomes.at("BadPasswordSignature") == 32);

  const auto& replay = find(ScenarioId::ReplayCredentials);
  CHECK(replay.attempts == 1000);
  CHECK(replay.outcomes.at("AlreadyConsumed") == 1000);

  const auto& brute = find(ScenarioId::OfflineBruteForce);
  CHECK(brute.outcomes.count("Accept") == 0);
  CHECK(brute.outcomes.at("StepUpRequired") >= 1);
  CHECK(brute.outcomes.at("BadBrowserSignature") >= 2);

  const auto& store = find(ScenarioId::StolenServerStore);
  CHECK(store.outcomes.at("StepUpRequired") == 1);
  CHECK(store.outcomes.at("UnknownPassword") == 32);

  const auto& forge = find(ScenarioId::HarvestAndForge);
  CHECK(forge.attempts == 32 * 11);
  CHECK(forge.outcomes.count("Accept") == 0);
}

TEST_CASE("enrolment substitution depends on transport integrity", "[attack]") {
  const auto& open = find(ScenarioId::EnrolmentSubstitution, false);
  INFO(open.notes);
  CHECK(open.successes_by_adversary == 32);  // every enrolment leg, no change leg
  CHECK_FALSE(open.blocked);
  CHECK(open.as_expected());

  const auto& tls = find(ScenarioId::EnrolmentSubstitution, true);
  INFO(tls.notes);
  CHECK(tls.successes_by_adversary == 0);
  CHECK(tls.blocked);
  CHECK(tls.as_expected());
}

TEST_CASE("reports are deterministic for a seed", "[attack]") {
  ScenarioParams p;
  p.samples = 4;
  p.dictionary_size = 16;
  p.replays = 10;
  for (auto id : all_scenarios()) {
    CHECK(report_to_json(run_scenario(id, p)) == report_to_json(run_scenario(id, p)));
  }
}

TEST_CASE("report formats", "[attack]") {
  const auto j = reports_to_json(default_run());
  REQUIRE(j.is_array());
  CHECK(j.size() == 9);
  for (const auto& r : j) {
    for (const char* key : {"id", "abuse_case", "attempts", "successes_by_adversary", "blocked", "transport_integrity",
                            "as_expected", "outcomes", "notes"}) {
      CHECK(r.contains(key));
    }
    CHECK(r["blocked"].get<bool>() == (r["successes_by_adversary"].get<std::size_t>() == 0));
  }
  const std::string table = summary_table(default_run());
  for (auto id : all_scenarios()) CHECK(table.find(std::string(to_string(id))) != std::string::npos);
  CHECK(table.find("Compromised") != std::string::npos);
  CHECK(table.find("NO\n") == std::string::npos);
}

TEST_CASE("misconfigured harness is refused", "[attack]") {
  ScenarioParams p;
  p.samples = 0;
  CHECK_THROWS_AS(run_scenario(ScenarioId::ReplayCredentials, p), HarnessMisconfigured);
  p = {};
  p.future_skew = 10;
  CHECK_THROWS_AS(run_scenario(ScenarioId::FutureClock, p), HarnessMisconfigured);
  p = {};
  p.replays = 0;
  CHECK_THROWS_AS(run_scenario(ScenarioId::ReplayCredentials, p), HarnessMisconfigured);
}
