#pragma once

#include <stdexcept>
#include <string>

namespace embamp {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// dimension or shape mismatch between inputs
class StructuralError : public Error {
public:
  using Error::Error;
};

class NumericOverflow : public Error {
public:
  using Error::Error;
};

class ConditioningError : public Error {
public:
  using Error::Error;
};

class DegenerateError : public Error {
public:
  using Error::Error;
};

class ValidationError : public Error {
public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

private:
  std::string field_;
};

class ConstraintViolation : public Error {
public:
  using Error::Error;
};

class InfeasibleError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace embamp
