#pragma once

#include <exception>
#include <stdexcept>
#include <string>

namespace skewirt {

// Exit-code contract of the command-line tool: usage 2, data 3, numerical 4.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode { kExitOk = 0, kExitUsage = 2, kExitData = 3, kExitNumerical = 4 };

/// Exit code for an exception escaping a command, plus the message prefix
/// ("error", "data error" or "numerical error"). Unknown exceptions rethrow.
struct ExitStatus {
  ExitCode code;
  const char* label;
};
ExitStatus classify(const std::exception_ptr& error);

}  // namespace skewirt
