#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace congestion {

// Failure categories shared by the library and the command-line tool. The CLI
// maps each category onto a process exit code.
enum class ErrorCode {
  kSchema,             // malformed game file
  kBadStructure,         // an arc on no path, or an O/D pair with < 2 paths
  kDegenerate,         // zero total demand or a cost that vanishes on (0, T]
  kInfeasibleFlow,
  kStructureMismatch,
  kUnknownPath,
  kDomain,             // argument outside a function's domain
  kPrecondition,
  kUnconverged,
  kInvariant,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string where = {})
      : std::runtime_error(message), code_(code), where_(std::move(where)) {}

  ErrorCode code() const { return code_; }
  // JSON pointer (or other locator) of the offending input, if known.
  const std::string& where() const { return where_; }

 private:
  ErrorCode code_;
  std::string where_;
};

}  // namespace congestion
