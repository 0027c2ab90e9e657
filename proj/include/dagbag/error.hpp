#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dagbag {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CycleError : public Error {
 public:
  using Error::Error;
};

class MissingEdge : public Error {
 public:
  using Error::Error;
};

class DuplicateEdge : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidNode : public Error {
 public:
  using Error::Error;
};

// Parent Gram matrix is numerically singular (collinear parents).
class SingularDesign : public Error {
 public:
  using Error::Error;
};

class ConstantColumn : public Error {
 public:
  using Error::Error;
};

class InfeasibleConstraints : public Error {
 public:
  using Error::Error;
};

class DegenerateResample : public Error {
 public:
  using Error::Error;
};

class TooManyEdges : public Error {
 public:
  using Error::Error;
};

// Failure while fitting ensemble member `index`.
class FitError : public Error {
 public:
  FitError(std::size_t index, const std::string& what)
      : Error("resample " + std::to_string(index) + ": " + what), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

// Parse failure; line and column are 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(std::string file, std::size_t line, std::size_t column, const std::string& what)
      : Error(format(file, line, column, what)),
        file_(std::move(file)),
        line_(line),
        column_(column) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& file, std::size_t line, std::size_t column,
                            const std::string& what) {
    std::string out = file.empty() ? std::string("<input>") : file;
    if (line > 0) out += ":" + std::to_string(line);
    if (column > 0) out += ":" + std::to_string(column);
    return out + ": " + what;
  }

  std::string file_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace dagbag
