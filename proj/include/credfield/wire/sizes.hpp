#pragma once

#include <cstddef>

namespace credfield::wire {

/// Published reference figures for a different, unspecified encoding.
inline constexpr std::size_t kReferenceTransmissionBytes = 401;
inline constexpr std::size_t kReferenceStorageBytes = 2048;

inline constexpr std::size_t kReferenceUserIdLength = 5;

struct SizeReport {
  /// Encoded verify message for a 5-byte user id.
  std::size_t transmission_bytes = 0;
  /// Store lines for one user with one registered browser.
  std::size_t storage_bytes_per_user = 0;
};

SizeReport measure_sizes();

}  // namespace credfield::wire
