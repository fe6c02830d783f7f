#pragma once

#include <stdexcept>
#include <string>

namespace adanets {

// Error categories map 1:1 onto process exit codes (and C API status values).
enum class ErrorKind {
  usage = 2,    // bad arguments, invalid config, unknown stage
  data = 3,     // missing/corrupt files, format violations
  numeric = 4,  // NaN loss, divergence, degenerate numerics
};

class AdaError : public std::runtime_error {
 public:
  AdaError(ErrorKind kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_usage(const std::string& msg) {
  throw AdaError(ErrorKind::usage, msg);
}
[[noreturn]] inline void throw_data(const std::string& msg) {
  throw AdaError(ErrorKind::data, msg);
}
[[noreturn]] inline void throw_numeric(const std::string& msg) {
  throw AdaError(ErrorKind::numeric, msg);
}

}  // namespace adanets
