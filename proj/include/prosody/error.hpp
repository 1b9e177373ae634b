#ifndef PROSODY_ERROR_HPP
#define PROSODY_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prosody {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user configuration: flags, config files, generator specs. CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Bad data or model content. CLI exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A malformed line in one of the TSV inputs.
class FormatError : public DataError {
 public:
  FormatError(const std::string& source, std::size_t line, const std::string& what)
      : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Unparseable prosodic mark string.
class MarkError : public DataError {
 public:
  using DataError::DataError;
};

/// Model file could not be read back (version, checksum, truncation).
class ModelFileError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace prosody

#endif  // PROSODY_ERROR_HPP
