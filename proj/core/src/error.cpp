#include "consensus_lab/error.hpp"

namespace consensus_lab {

void fail(ErrorKind kind, std::string_view message) {
  throw Error(kind, std::string(message));
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kValidation:
      return 2;
    case ErrorKind::kInfeasible:
      return 3;
    case ErrorKind::kNumerical:
      return 4;
  }
  return 1;
}

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kValidation:
      return "validation";
    case ErrorKind::kInfeasible:
      return "infeasible";
    case ErrorKind::kNumerical:
      return "numerical";
  }
  return "unknown";
}

}  // namespace consensus_lab
