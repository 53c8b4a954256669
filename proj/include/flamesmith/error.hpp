#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flamesmith {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EvalErrorKind { UnboundVariable, IndexOutOfRange, DivisionByZero, NonIntegral, BadCursor };

// Raised when an expression has no value in a given state.
class EvalError : public Error {
 public:
  EvalError(EvalErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}
  EvalErrorKind kind() const { return kind_; }

 private:
  EvalErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, std::string expected, const std::string& found)
      : Error("parse error at " + std::to_string(line) + ":" + std::to_string(column) + ": expected " +
              expected + (found.empty() ? "" : ", found '" + found + "'")),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string expected_;
};

class SemanticError : public Error {
 public:
  using Error::Error;
};

enum class DerivationErrorKind {
  UnsplittableForm,
  NoGuardFound,
  NoInitFound,
  NoTemplateMatch,
  UnsupportedStatement,
  TargetAbsent,
  IncompleteWorksheet,
  UnsupportedRecurrence,
  VacuousPrecondition,
};

const char* to_string(DerivationErrorKind kind);

// Failure of a derivation or analysis step. `step` names the worksheet step
// ("3", "8", ...) or the analysis stage that gave up.
class DerivationError : public Error {
 public:
  DerivationError(DerivationErrorKind kind, std::string step, const std::string& detail)
      : Error(std::string(to_string(kind)) + (step.empty() ? "" : " (step " + step + ")") + ": " + detail),
        kind_(kind),
        step_(std::move(step)) {}

  DerivationErrorKind kind() const { return kind_; }
  const std::string& step() const { return step_; }

 private:
  DerivationErrorKind kind_;
  std::string step_;
};

}  // namespace flamesmith
