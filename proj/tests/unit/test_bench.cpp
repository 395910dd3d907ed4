#include <catch_amalgamated.hpp>

#include "credfield/bench/bench.hpp"
#include "credfield/core/kdf.hpp"
#include "credfield/wire/sizes.hpp"
#include "oracle.hpp"

using namespace credfield;
using namespace credfield::bench;

TEST_CASE("baseline derive is SHA-256 of the password", "[bench][baseline]") {
  CHECK(to_hex(baseline_derive(SecretString(""))) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(to_hex(baseline_derive(SecretString("abc"))) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("baseline store matches the independent PBKDF2 oracle", "[bench][baseline]") {
  const auto digest = baseline_derive(SecretString("hunter2 hunter2"));
  const auto stored = baseline_store("alice", digest);
  const std::string salt = "alice";
  const auto expected =
      oracle::pbkdf2_sha512(oracle::Bytes(digest.begin(), digest.end()), oracle::Bytes(salt.begin(), salt.end()), 1000, 64);
  CHECK(to_hex(stored.bytes()) == to_hex(expected));
}

TEST_CASE("baseline verify", "[bench][baseline]") {
  const auto stored = baseline_store("alice", baseline_derive(SecretString("right")));
  CHECK(baseline_verify("alice", baseline_derive(SecretString("right")), stored));
  CHECK_FALSE(baseline_verify("alice", baseline_derive(SecretString("wrong")), stored));
  CHECK_FALSE(baseline_verify("bob", baseline_derive(SecretString("right")), stored));
}

TEST_CASE("bench reports", "[bench]") {
  for (auto proto : {Protocol::Proposed, Protocol::HashedPassword}) {
    const auto one = run_bench(BenchConfig{1, proto, {}});
    CHECK(one.n == 1);
    CHECK(one.per_auth_ms == Catch::Approx(one.total_seconds * 1000.0));
    const auto some = run_bench(BenchConfig{20, proto, {}});
    CHECK(some.per_auth_ms == Catch::Approx(some.total_seconds * 1000.0 / 20));
    CHECK(some.per_auth_ms < 100.0);
  }
  const auto proposed = run_bench(BenchConfig{3, Protocol::Proposed, {}});
  const auto sizes = wire::measure_sizes();
  CHECK(proposed.transmission_bytes == sizes.transmission_bytes);
  CHECK(proposed.storage_bytes == sizes.storage_bytes_per_user);
  CHECK(proposed.transmission_bytes <= 512);
  CHECK(proposed.storage_bytes <= 2048);

  CHECK_THROWS_AS(run_bench(BenchConfig{0, Protocol::Proposed, {}}), std::invalid_argument);
  CHECK(protocol_from_string("HashedPassword") == Protocol::HashedPassword);
  CHECK_FALSE(protocol_from_string("SRP").has_value());

  const auto hashed = run_bench(BenchConfig{3, Protocol::HashedPassword, {}});
  const auto j = report_to_json(proposed);
  CHECK(j["reference"]["total_seconds_for_1000"] == 33.92);
  CHECK(report_to_json(hashed)["reference"]["total_seconds_for_1000"] == 12.99);
  const std::string table = bench_table({proposed, hashed});
  CHECK(table.find("Proposed") != std::string::npos);
  CHECK(table.find("33.920") != std::string::npos);
  CHECK(table.find("401") != std::string::npos);
}
