#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace spps {

// Exit codes used by the command line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitGeneric = 1,
  kExitParse = 2,
  kExitValidate = 3,
  kExitU0 = 4,
  kExitSolver = 5,
};

/// Base class of every error raised by the library. Carries the CLI exit
/// code the error maps to.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, int code = kExitGeneric)
      : std::runtime_error(what), code_(code) {}
  int exit_code() const noexcept { return code_; }

 private:
  int code_;
};

/// Syntax error in an expression or problem file. `offset` is the byte
/// offset into the parsed text.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : Error(msg + " at offset " + std::to_string(offset), kExitParse), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation outside the domain of a function (pole, log of zero, non-finite result).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& msg) : Error(msg, kExitValidate) {}
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& msg)
      : Error(field + ": " + msg, kExitValidate), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// The particular solution u0 could not be built or is unusable.
class U0Error : public Error {
 public:
  explicit U0Error(const std::string& msg) : Error(msg, kExitU0) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& msg) : Error(msg, kExitSolver) {}
};

}  // namespace spps
