#include "permqubo/error.hpp"

namespace permqubo {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnsupportedFormat: return "unsupported format";
    case ErrorKind::MalformedInput: return "malformed input";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Dimension: return "dimension error";
    case ErrorKind::InvalidSolution: return "invalid solution";
    case ErrorKind::InfeasibleSolution: return "infeasible solution";
    case ErrorKind::Size: return "size error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Capacity: return "capacity error";
    case ErrorKind::Assembly: return "assembly error";
    case ErrorKind::Numerical: return "numerical error";
    case ErrorKind::Io: return "io error";
  }
  return "error";
}

}  // namespace permqubo
