#pragma once

#include <string>

#include <stubvote/error.hpp>

#ifndef STUBVOTE_DATA_DIR
#error "STUBVOTE_DATA_DIR must point at the bundled fixtures"
#endif

namespace stubvote::testing {

inline std::string data_path(const std::string& name) { return std::string(STUBVOTE_DATA_DIR) + "/" + name; }

template <typename F>
ErrorKind error_kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return static_cast<ErrorKind>(-1);
}

}  // namespace stubvote::testing
