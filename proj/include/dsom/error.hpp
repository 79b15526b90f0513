#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dsom {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on caller-supplied arguments does not hold.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A matrix (from a file or from raw values) is malformed. `row` and `col`
/// locate the offending entry; both are npos when the problem is not tied
/// to a single entry.
class MatrixError : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  MatrixError(const std::string& what, std::size_t row = npos,
              std::size_t col = npos)
      : Error(format_location(what, row, col)), row_(row), col_(col) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  static std::string format_location(const std::string& what, std::size_t row,
                            std::size_t col) {
    if (row == npos) return what;
    std::string out = what + " at (" + std::to_string(row);
    if (col != npos) out += ", " + std::to_string(col);
    return out + ")";
  }

  std::size_t row_;
  std::size_t col_;
};

/// Two runs that must agree bit for bit did not.
class DeterminismError : public Error {
 public:
  using Error::Error;
};

}  // namespace dsom
