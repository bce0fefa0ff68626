#pragma once

#include <stdexcept>
#include <string>

namespace stubvote {

/// Error categories. The CLI maps these to process exit codes.
enum class ErrorKind {
  Parameter,        // config outside S_n, invalid flags
  Domain,           // state or time outside the admissible range
  InsufficientData, // too few observations
  MissingData,      // party absent from a record
  Parse,            // malformed input file
  Ordering,         // non-increasing times
  NoFeasibleModel,  // empty search grid
  EmptyEvaluation,  // nothing left to score
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace stubvote
