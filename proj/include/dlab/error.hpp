#pragma once

#include <stdexcept>
#include <string>

namespace dlab {

enum class ErrorKind {
  size,        // construction guard exceeded
  geometry,    // empty ball, empty annulus, no interior
  recurrence,  // quantity infinite on a recurrent (unkilled) generator
  domain,      // argument outside the operation's domain
  numeric,     // solver failure
  sampling,    // not enough samples
  instance,    // certificate instance violates its hypotheses
  range,       // series did not converge / overflow
  parse,       // configuration or input text
  io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace dlab
