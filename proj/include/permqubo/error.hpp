#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace permqubo {

enum class ErrorKind {
  UnsupportedFormat,
  MalformedInput,
  Domain,
  Dimension,
  InvalidSolution,
  InfeasibleSolution,
  Size,
  Config,
  Capacity,
  Assembly,
  Numerical,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` tells callers which
/// contract was broken.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace permqubo
