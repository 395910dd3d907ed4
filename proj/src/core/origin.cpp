#include "credfield/core/origin.hpp"

#include <algorithm>
#include <cctype>

#include "credfield/core/error.hpp"

namespace credfield::core {

namespace {

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool valid_scheme(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
  });
}

// Registered names: ASCII letters, digits, '-', '.', '_'. Non-ASCII bytes pass
// through verbatim (no IDNA mapping).
bool valid_reg_name(std::string_view host) {
  return !host.empty() && std::all_of(host.begin(), host.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || std::isalnum(u) || c == '-' || c == '.' || c == '_';
  });
}

bool valid_ipv6_literal(std::string_view host) {
  if (host.size() < 3 || host.front() != '[' || host.back() != ']') return false;
  return std::all_of(host.begin() + 1, host.end() - 1, [](char c) {
    return std::isxdigit(static_cast<unsigned char>(c)) || c == ':' || c == '.';
  });
}

[[noreturn]] void malformed(std::string_view why) { throw CoreError(Errc::MalformedUrl, std::string(why)); }

}  // namespace

CanonicalOrigin CanonicalOrigin::parse(std::string_view raw) {
  if (std::any_of(raw.begin(), raw.end(),
                  [](char c) { return static_cast<unsigned char>(c) <= 0x20 || c == 0x7f; })) {
    malformed("whitespace or control character in URL");
  }
  const auto sep = raw.find("://");
  if (sep == std::string_view::npos) malformed("not an absolute URL");

  CanonicalOrigin origin;
  const std::string_view scheme = raw.substr(0, sep);
  if (!valid_scheme(scheme)) malformed("invalid scheme");
  std::transform(scheme.begin(), scheme.end(), std::back_inserter(origin.scheme_), lower);
  if (origin.scheme_ != "http" && origin.scheme_ != "https") {
    throw CoreError(Errc::UnsupportedScheme, "scheme must be http or https");
  }

  std::string_view authority = raw.substr(sep + 3);
  authority = authority.substr(0, authority.find_first_of("/?#"));
  if (const auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);

  std::string_view host;
  std::string_view port_text;
  if (!authority.empty() && authority.front() == '[') {
    const auto close = authority.find(']');
    if (close == std::string_view::npos) malformed("unterminated IPv6 literal");
    host = authority.substr(0, close + 1);
    const std::string_view rest = authority.substr(close + 1);
    if (!rest.empty()) {
      if (rest.front() != ':') malformed("junk after IPv6 literal");
      port_text = rest.substr(1);
    }
    if (!valid_ipv6_literal(host)) malformed("invalid IPv6 literal");
  } else {
    const auto colon = authority.rfind(':');
    host = authority.substr(0, colon);
    if (colon != std::string_view::npos) port_text = authority.substr(colon + 1);
    if (!valid_reg_name(host)) malformed("invalid host");
  }
  std::transform(host.begin(), host.end(), std::back_inserter(origin.host_), lower);

  if (!port_text.empty()) {
    if (port_text.size() > 5 || !std::all_of(port_text.begin(), port_text.end(),
                                             [](char c) { return c >= '0' && c <= '9'; })) {
      malformed("invalid port");
    }
    const unsigned long port = std::stoul(std::string(port_text));
    if (port > 65535) malformed("port out of range");
    const unsigned long default_port = origin.scheme_ == "https" ? 443 : 80;
    if (port != default_port) origin.port_ = static_cast<std::uint16_t>(port);
  }
  return origin;
}

std::string CanonicalOrigin::serialize() const {
  std::string out = scheme_ + "://" + host_;
  if (port_) out += ":" + std::to_string(*port_);
  return out;
}

}  // namespace credfield::core
