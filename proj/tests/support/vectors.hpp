#pragma once

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace testsupport {

// Frozen vectors produced by tests/oracle/gen_vectors.py.
inline const nlohmann::json& vectors() {
  static const nlohmann::json data = [] {
    std::ifstream in(CREDFIELD_VECTORS_FILE);
    if (!in) throw std::runtime_error("cannot open " CREDFIELD_VECTORS_FILE);
    return nlohmann::json::parse(in);
  }();
  return data;
}

}  // namespace testsupport
