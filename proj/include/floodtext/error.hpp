#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace floodtext {

// Error buckets; the CLI maps them 1:1 onto exit codes.
enum class ErrorKind { config = 1, data = 2, numerics = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error(ErrorKind::config, m) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& m) : Error(ErrorKind::data, m) {}
};

// Malformed file contents (bad header, bad magic, truncation).
class FormatError : public DataError {
 public:
  explicit FormatError(const std::string& m) : DataError(m) {}
};

// A single malformed CSV record; carries the 1-based physical line number
// where the record starts.
class RowError : public FormatError {
 public:
  RowError(std::size_t line, const std::string& m)
      : FormatError("line " + std::to_string(line) + ": " + m), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class LabelError : public DataError {
 public:
  explicit LabelError(const std::string& m) : DataError(m) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& m) : Error(ErrorKind::numerics, m) {}
};

class IndexError : public Error {
 public:
  explicit IndexError(const std::string& m) : Error(ErrorKind::numerics, m) {}
};

// Non-finite values or other numeric failures.
class NumericsError : public Error {
 public:
  explicit NumericsError(const std::string& m) : Error(ErrorKind::numerics, m) {}
};

}  // namespace floodtext
