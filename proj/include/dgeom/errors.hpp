#pragma once

#include <stdexcept>
#include <string>

namespace dgeom {

// Base for every error the library reports.  The status() value is the exit
// code the CLI uses for it.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  virtual int status() const { return 5; }
};

class ConfigError : public Error {
public:
  using Error::Error;
  int status() const override { return 2; }
};

class ParseError : public Error {
public:
  ParseError(const std::string& msg, std::size_t pos)
      : Error(msg + " at position " + std::to_string(pos)), pos_(pos) {}
  std::size_t position() const { return pos_; }
  int status() const override { return 3; }

private:
  std::size_t pos_;
};

// Numerical trouble at a point: domain violations, singular blocks, poles.
class NumericError : public Error {
public:
  using Error::Error;
  int status() const override { return 4; }
};

class DomainError : public NumericError {
public:
  using NumericError::NumericError;
};

class DegenerateError : public NumericError {
public:
  using NumericError::NumericError;
};

class OrderError : public Error {
public:
  using Error::Error;
  int status() const override { return 2; }
};

}  // namespace dgeom
