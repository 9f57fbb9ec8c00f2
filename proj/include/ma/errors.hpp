#pragma once

#include <stdexcept>
#include <string>

namespace ma {

// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file; message carries "path:line: what".
struct ParseError : Error {
  ParseError(const std::string& path, int line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_number(line) {}
  int line_number;
};

// A linear solve failed (singular factorization or residual check failed).
struct SolveError : Error {
  explicit SolveError(const std::string& msg) : Error(msg) {}
};

} // namespace ma
