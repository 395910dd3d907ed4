#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace credfield::core {

/// Web origin (scheme, host, optional non-default port) of the page hosting
/// the credential field. Path, query, fragment and userinfo never reach it.
class CanonicalOrigin {
 public:
  /// Throws CoreError{MalformedUrl | UnsupportedScheme}.
  static CanonicalOrigin parse(std::string_view raw_url);

  const std::string& scheme() const { return scheme_; }
  const std::string& host() const { return host_; }
  std::optional<std::uint16_t> port() const { return port_; }

  /// `scheme "://" host [":" port]`
  std::string serialize() const;

  friend bool operator==(const CanonicalOrigin&, const CanonicalOrigin&) = default;

 private:
  CanonicalOrigin() = default;
  std::string scheme_;
  std::string host_;
  std::optional<std::uint16_t> port_;
};

inline CanonicalOrigin canonical_origin(std::string_view raw_url) { return CanonicalOrigin::parse(raw_url); }

}  // namespace credfield::core
