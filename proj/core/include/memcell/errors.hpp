#pragma once

#include <stdexcept>
#include <string>

namespace memcell {

/// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
  Domain,     ///< invalid input or violated precondition
  Parse,      ///< unreadable or malformed input file
  Numerical,  ///< an algorithm could not reach a trustworthy result
};

/// Base error. Carries the module that raised it so reports can name the
/// failing stage ("[fixpoint] degenerate generic element ...").
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message)
      : std::runtime_error("[" + module + "] " + message),
        kind_(kind),
        module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

class DomainError : public Error {
 public:
  DomainError(std::string module, const std::string& message)
      : Error(ErrorKind::Domain, std::move(module), message) {}
};

class ParseError : public Error {
 public:
  ParseError(std::string module, const std::string& message)
      : Error(ErrorKind::Parse, std::move(module), message) {}
};

class NumericalError : public Error {
 public:
  NumericalError(std::string module, const std::string& message)
      : Error(ErrorKind::Numerical, std::move(module), message) {}
};

}  // namespace memcell
