#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace robinson {

/// Raised by the expression and model-file parsers. `position` is a 0-based
/// character offset into the parsed text (or a line number for model files).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A malformed model file. `line` is 1-based, 0 when no line applies.
class ModelError : public std::runtime_error {
 public:
  ModelError(const std::string& what, int line, const std::string& file = "")
      : std::runtime_error(prefix(file, line) + what), detail_(what), line_(line) {}
  int line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  static std::string prefix(const std::string& file, int line) {
    std::string p = file;
    if (line > 0) p += (p.empty() ? "line " : ":") + std::to_string(line);
    return p.empty() ? p : p + ": ";
  }
  std::string detail_;
  int line_;
};

/// Evaluation hit a pole or a branch point (division by zero, log 0, ...).
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called with inputs violating its documented contract.
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative solver failed to converge.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace robinson
