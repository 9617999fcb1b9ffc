#pragma once

#include <stdexcept>
#include <string>

namespace autologit {

// Exit codes used by the command-line tool; every library error maps to one.
enum class ErrorKind { Config = 2, Data = 3, Numerical = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

// Raised by the perfect sampler when the monotone coupling does not apply
// (rho1 < 0). Callers fall back to plain Gibbs sweeps.
class CftpUnsupported : public NumericalError {
 public:
  explicit CftpUnsupported(const std::string& what) : NumericalError(what) {}
};

}  // namespace autologit
