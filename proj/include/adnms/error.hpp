#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adnms {

// Invalid parameters or an impossible combination of options.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Values that violate a data invariant (NaN score, density out of range, ...).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A malformed record in one of the line-oriented files.
class ParseError : public InputError {
 public:
  ParseError(std::string path, std::size_t line, std::string field, const std::string& what)
      : InputError(path + ":" + std::to_string(line) + ": field '" + field + "': " + what),
        path_(std::move(path)),
        line_(line),
        field_(std::move(field)) {}

  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::string path_;
  std::size_t line_;
  std::string field_;
};

// Failure to open, read or write a file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adnms
