#include <sys/wait.h>

#include <catch_amalgamated.hpp>
#include <cstdio>
#include <cstdlib>

#include "credfield/agent/agent.hpp"
#include "support/fixtures.hpp"
#include "support/secrets.hpp"

using namespace credfield;

namespace {

struct Run {
  int status = -1;
  std::string output;  // stdout and stderr
};

/// Runs the CLI from `dir`; stdin is /dev/null and there is no controlling
/// terminal to prompt on when run under ctest with setsid.
Run run_cli(const std::filesystem::path& dir, const std::string& args) {
  const std::string cmd =
      "cd '" + dir.string() + "' && setsid '" CREDFIELD_CLI "' " + args + " </dev/null 2>&1";
  Run r;
  std::FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) r.output.append(buf, n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

struct Env {
  explicit Env(std::initializer_list<std::pair<const char*, const char*>> vars) {
    for (const auto& [k, v] : vars) {
      ::setenv(k, v, 1);
      names.push_back(k);
    }
  }
  ~Env() {
    for (const char* k : names) ::unsetenv(k);
  }
  std::vector<const char*> names;
};

}  // namespace

TEST_CASE("cli enrol, login, change and store inspection", "[cli]") {
  testsupport::TempDir dir;
  const std::string store = (dir / "store.txt").string();
  Env store_env{{"CREDFIELD_STORE", store.c_str()}};
  std::string all_output;

  {
    Env pw{{"CREDFIELD_PASSWORD", "correct horse battery"}};
    const auto enrol = run_cli(dir.path(), "enrol --user alice --profile p1");
    all_output += enrol.output;
    CHECK(enrol.status == 0);
    CHECK(enrol.output.rfind("Enrolled", 0) == 0);

    const auto again = run_cli(dir.path(), "enrol --user alice --profile p1");
    all_output += again.output;
    CHECK(again.status == 1);
    CHECK(again.output.find("UserExists") != std::string::npos);

    const auto login = run_cli(dir.path(), "login --user alice --profile p1");
    all_output += login.output;
    CHECK(login.status == 0);
    CHECK(login.output.rfind("Accept", 0) == 0);

    const auto spoofed = run_cli(dir.path(), "login --user alice --profile p1 --spoof-origin https://bank-example.evil");
    all_output += spoofed.output;
    CHECK(spoofed.status == 1);
    CHECK(spoofed.output.find("UnknownPassword") != std::string::npos);

    const auto skewed = run_cli(dir.path(), "login --user alice --profile p1 --skew 3600");
    all_output += skewed.output;
    CHECK(skewed.status == 1);
    CHECK(skewed.output.find("FutureTimestamp") != std::string::npos);
  }
  {
    Env pw{{"CREDFIELD_PASSWORD", "correct horse battery"}, {"CREDFIELD_PASSWORD_REPEAT", "correct horse batterz"}};
    const auto mismatch = run_cli(dir.path(), "enrol --user bob --profile p1");
    all_output += mismatch.output;
    CHECK(mismatch.status == 1);
    CHECK(mismatch.output.find("PasswordMismatch") != std::string::npos);
  }
  {
    Env pw{{"CREDFIELD_PASSWORD", "correct horse battery"}, {"CREDFIELD_NEW_PASSWORD", "new staple 42"}};
    const auto change = run_cli(dir.path(), "change --user alice --profile p1");
    all_output += change.output;
    CHECK(change.status == 0);
    CHECK(change.output.find("PasswordChanged") != std::string::npos);
  }
  {
    Env pw{{"CREDFIELD_PASSWORD", "new staple 42"}};
    const auto login = run_cli(dir.path(), "login --user alice --profile p1");
    all_output += login.output;
    CHECK(login.status == 0);

    // unknown browser under HighSecurity, then operator confirmation
    const auto stepped = run_cli(dir.path(), "login --user alice --profile p2 --mode HighSecurity");
    all_output += stepped.output;
    CHECK(stepped.status == 1);
    CHECK(stepped.output.find("StepUpRequired") != std::string::npos);
    const auto line = stepped.output.find("browser ");
    REQUIRE(line != std::string::npos);
    const std::string id = stepped.output.substr(line + 8, stepped.output.find('\n', line) - line - 8);

    const auto confirm = run_cli(dir.path(), "stepup confirm alice -- " + id);
    all_output += confirm.output;
    CHECK(confirm.status == 0);
    const auto after = run_cli(dir.path(), "login --user alice --profile p2 --mode HighSecurity");
    all_output += after.output;
    CHECK(after.status == 0);

    const auto bl = run_cli(dir.path(), "blacklist add -- " + id);
    all_output += bl.output;
    CHECK(bl.status == 0);
    const auto denied = run_cli(dir.path(), "login --user alice --profile p2");
    all_output += denied.output;
    CHECK(denied.status == 1);
    CHECK(denied.output.find("BlacklistDenied") != std::string::npos);
    const auto list = run_cli(dir.path(), "blacklist list");
    CHECK(list.output == id + "\n");
  }

  const auto inspect = run_cli(dir.path(), "store inspect");
  all_output += inspect.output;
  CHECK(inspect.status == 0);
  CHECK(inspect.output.find("users 1") != std::string::npos);
  CHECK(inspect.output.find("user alice") != std::string::npos);
  CHECK(inspect.output.find("BlacklistDenied") != std::string::npos);

  testsupport::SecretSet secrets;
  const auto origin = core::CanonicalOrigin::parse("https://bank.example");
  const auto spoof = core::CanonicalOrigin::parse("https://bank-example.evil");
  for (const char* pw : {"correct horse battery", "correct horse batterz", "new staple 42"}) {
    for (const char* user : {"alice", "bob"}) {
      secrets.add_password(pw, origin, user);
      secrets.add_password(pw, spoof, user);
    }
  }
  secrets.add_key(agent::open_profile(dir / "p1").browser_key);
  secrets.add_key(agent::open_profile(dir / "p2").browser_key);
  CHECK(secrets.find_in(all_output).empty());
  CHECK(secrets.find_in(testsupport::read_file(store)).empty());
}

TEST_CASE("cli usage errors exit 2", "[cli]") {
  testsupport::TempDir dir;
  CHECK(run_cli(dir.path(), "").status == 2);
  CHECK(run_cli(dir.path(), "frobnicate").status == 2);
  CHECK(run_cli(dir.path(), "login --profile p1").status == 2);  // --user missing
  CHECK(run_cli(dir.path(), "attack NoSuchScenario").status == 2);
  CHECK(run_cli(dir.path(), "bench SRP").status == 2);
  CHECK(run_cli(dir.path(), "login --user a --origin ftp://x").status == 2);
  CHECK(run_cli(dir.path(), "store inspect").status == 2);  // no store named
  CHECK(run_cli(dir.path(), "blacklist add not-an-id --store s").status == 1);  // no store file yet

  // no password in the environment and no terminal to prompt on
  const auto no_pw = run_cli(dir.path(), "login --user alice --profile p1");
  CHECK(no_pw.status == 2);
  CHECK(no_pw.output.find("CREDFIELD_PASSWORD") != std::string::npos);
  CHECK(run_cli(dir.path(), "--help").status == 0);
}

TEST_CASE("cli attack exit status follows the outcome", "[cli]") {
  testsupport::TempDir dir;
  const auto blocked = run_cli(dir.path(), "attack SpoofedUrlMitm --samples 3 --json report.json");
  CHECK(blocked.status == 0);
  CHECK(blocked.output.find("No compromise") != std::string::npos);
  const auto report = nlohmann::json::parse(testsupport::read_file(dir / "report.json"));
  CHECK(report.at(0).at("id") == "SpoofedUrlMitm");

  const auto open = run_cli(dir.path(), "attack EnrolmentSubstitution --samples 2 --no-integrity");
  CHECK(open.status == 1);
  CHECK(open.output.find("Compromised") != std::string::npos);

  const auto bench = run_cli(dir.path(), "bench HashedPassword -n 5 --json -");
  CHECK(bench.status == 0);
  CHECK(bench.output.find("\"protocol\": \"HashedPassword\"") != std::string::npos);
}
