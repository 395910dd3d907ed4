#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "credfield/core/credential.hpp"

namespace credfield::bench {

enum class Protocol { Proposed, HashedPassword };

std::string_view to_string(Protocol p);
std::optional<Protocol> protocol_from_string(std::string_view name);

struct BenchConfig {
  std::size_t n = 1000;
  Protocol protocol = Protocol::Proposed;
  core::KdfParams kdf{};
};

struct BenchReport {
  Protocol protocol = Protocol::Proposed;
  std::size_t n = 0;
  double total_seconds = 0;
  double per_auth_ms = 0;  // total_seconds * 1000 / n
  std::size_t transmission_bytes = 0;
  std::size_t storage_bytes = 0;
};

/// A cycle that did not authenticate; the benchmark is invalid.
class BenchAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// n sequential challenge, derive, verify cycles for one enrolled user.
/// Throws BenchAborted on any failed authentication, std::invalid_argument if n == 0.
BenchReport run_bench(const BenchConfig& cfg);

// Hashed-password baseline: the browser sends SHA-256(password), the server
// keeps PBKDF2-HMAC-SHA512 of that digest salted with the user id.
core::Digest baseline_derive(const SecretString& password);
core::StoredIdentifier baseline_store(std::string_view user_id, const core::Digest& digest,
                                      const core::KdfParams& kdf = {});
bool baseline_verify(std::string_view user_id, const core::Digest& digest, const core::StoredIdentifier& stored,
                     const core::KdfParams& kdf = {});

/// Published reference figures for the comparison column.
struct PublishedReference {
  double total_seconds;
  std::size_t transmission_bytes;
  std::size_t storage_bytes;
};
std::optional<PublishedReference> published_reference(Protocol p);

nlohmann::json report_to_json(const BenchReport& r);
/// Rows per metric, one column per protocol run plus the reference figures.
std::string bench_table(const std::vector<BenchReport>& reports);

}  // namespace credfield::bench
