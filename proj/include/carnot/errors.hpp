#pragma once

#include <stdexcept>
#include <string>

namespace carnot {

// Error taxonomy mirrored by the CLI exit codes.
struct ParseError : std::runtime_error {
  int line = 0, column = 0;
  ParseError(const std::string& msg, int ln = 0, int col = 0)
      : std::runtime_error(msg), line(ln), column(col) {}
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CoverageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace carnot
