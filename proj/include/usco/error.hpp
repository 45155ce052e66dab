#pragma once

#include <stdexcept>
#include <string>

namespace usco {

/// Error categories shared by the C++ core and the C API status codes.
enum class ErrorKind {
  Domain,
  Dimension,
  Feasibility,
  NoSolution,
  Parse,
  Io,
  Convergence,
  Config,
  Format,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace usco
