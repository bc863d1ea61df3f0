#pragma once

#include <stdexcept>
#include <string>

namespace largenoise {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (range, sign, size).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two fields or an operator and a field live on different bases.
class BasisMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A rate rule was requested outside the hypotheses it was derived under.
class HypothesisViolation : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// An iterative method hit its iteration cap or diverged.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A configuration file is missing, malformed, or lacks a required field.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace largenoise
