#pragma once

#include <stdexcept>
#include <string>

namespace amr {

/// Base of every error raised by the library. Subclasses name the failure
/// category so callers (and the CLI exit-code mapping) can dispatch on type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error { using Error::Error; };
class WrongKind : public Error { using Error::Error; };
class CalibrationError : public Error { using Error::Error; };
class InvalidSpec : public Error { using Error::Error; };
class InvalidRatio : public Error { using Error::Error; };
class EmptyInput : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class ContractError : public Error { using Error::Error; };
class InvalidLabel : public Error { using Error::Error; };
class TrainingDivergence : public Error { using Error::Error; };
class InvalidConfig : public Error { using Error::Error; };
class FitError : public Error { using Error::Error; };
class ConsistencyError : public Error { using Error::Error; };
class IncompleteData : public Error { using Error::Error; };
class ScenarioError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

/// Parse failure in a declarative config; `where()` is a JSON-pointer-like path.
class ParseError : public Error {
 public:
  ParseError(std::string where, const std::string& what)
      : Error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

enum class FormatFault { bad_magic, version_mismatch, truncated, malformed };

class FormatError : public Error {
 public:
  FormatError(FormatFault fault, const std::string& what) : Error(what), fault_(fault) {}
  FormatFault fault() const noexcept { return fault_; }

 private:
  FormatFault fault_;
};

}  // namespace amr
