#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace consensus_lab {

/// Failure categories. Each maps onto a distinct process exit code in the CLI.
enum class ErrorKind {
  kValidation,   // malformed input, violated preconditions
  kInfeasible,   // empty design space, unstable trajectory
  kNumerical,    // eigen-solver or root-finder failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, std::string_view message);

/// 0 success, 2 validation, 3 infeasible/unstable, 4 numerical.
int exit_code(ErrorKind kind) noexcept;

std::string_view to_string(ErrorKind kind) noexcept;

}  // namespace consensus_lab
