#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ladder {

// Caller broke a documented precondition (bad argument, wrong dimensions,
// unknown name). These indicate bugs at the call site, not bad input data.
class ContractError : public std::invalid_argument {
 public:
  explicit ContractError(const std::string& what) : std::invalid_argument(what) {}
};

// A file or stream could not be read or written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Structured input that is malformed beyond per-line recovery.
// line is 1-based; 0 means the error is not tied to a specific line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Training produced a non-finite loss or parameter.
class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, int iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

}  // namespace ladder
