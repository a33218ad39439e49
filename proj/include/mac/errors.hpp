#pragma once

#include <stdexcept>
#include <string>

namespace mac {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative numeric kernel failed to converge or produced garbage.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Orthogonal projection requested for a (numerically) singular matrix.
class DegenerateProjectionError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Time stepping produced non-finite values.
class DivergenceError : public Error {
 public:
  DivergenceError(long long step, double max_magnitude, const std::string& what)
      : Error(what), step_(step), max_magnitude_(max_magnitude) {}
  long long step() const { return step_; }
  double max_magnitude() const { return max_magnitude_; }

 private:
  long long step_;
  double max_magnitude_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public Error {
 public:
  IoError(std::string path, const std::string& what)
      : Error(what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace mac
