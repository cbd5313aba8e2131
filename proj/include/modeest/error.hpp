#pragma once

#include <stdexcept>
#include <string>

namespace modeest {

/// Failure category. The numeric values double as CLI exit codes.
enum class ErrorKind : int {
  Usage = 2,    ///< caller passed arguments outside an operation's domain
  Data = 3,     ///< input data is malformed or degenerate
  Numeric = 4,  ///< a formula broke down (negative first-order variance, ...)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct UsageError : Error {
  explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

struct DataError : Error {
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

}  // namespace modeest
