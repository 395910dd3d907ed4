#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace credfield::core {

enum class Errc {
  MalformedUrl,
  UnsupportedScheme,
  EmptyUserId,
  FieldTooLong,
  EmptyPassword,
  EntropyFailure,
  InvalidScalar,
  CryptoFailure,
};

std::string_view to_string(Errc code);

class CoreError : public std::runtime_error {
 public:
  CoreError(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace credfield::core
