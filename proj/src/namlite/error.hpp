#ifndef NAMLITE_ERROR_HPP
#define NAMLITE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace namlite {

// Base class for every error raised by the library. The subclasses map onto the
// exit-code taxonomy used by the C API and the command-line tool.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration (exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed, missing or unusable input data (exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

// Divergence, non-convergence or non-finite values during fitting (exit code 4).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace namlite

#endif  // NAMLITE_ERROR_HPP
