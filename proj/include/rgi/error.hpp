#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rgi {

// Base for every error the library raises. `exit_code` follows the CLI
// convention: 2 input/usage, 3 training, 4 extraction.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, int exit_code = 2)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

class RegexSyntaxError : public Error {
 public:
  RegexSyntaxError(const std::string& msg, std::size_t offset)
      : Error("regex syntax error at offset " + std::to_string(offset) + ": " + msg),
        offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownTokenError : public Error {
 public:
  explicit UnknownTokenError(const std::string& token)
      : Error("unknown token '" + token + "'"), token_(token) {}
  const std::string& token() const noexcept { return token_; }

 private:
  std::string token_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& msg)
      : Error(source + ":" + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Sampling / search budgets that ran out.
class BudgetError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  explicit TrainingError(const std::string& what) : Error(what, 3) {}
};

class ExtractionError : public Error {
 public:
  explicit ExtractionError(const std::string& what) : Error(what, 4) {}
};

}  // namespace rgi
