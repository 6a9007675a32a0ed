#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tvar {

/// A caller broke a documented precondition (width mismatch, bad index, ...).
class ContractViolation : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// An internal invariant of the engine failed. Indicates a bug, not bad input.
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Diagnostic for malformed `.msys` text, carrying a 1-based source position.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, std::size_t column, const std::string &message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                           ": " + message),
        line_(line), column_(column), message_(message) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string &message() const { return message_; }

private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

/// Malformed property text or a property naming an undeclared atom.
class FormulaError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A state-space or time budget was exhausted. Carries the counts reached.
class ResourceLimit : public std::runtime_error {
public:
  ResourceLimit(const std::string &what, std::size_t states,
                std::size_t transitions)
      : std::runtime_error(what), states_(states), transitions_(transitions) {}

  std::size_t states() const { return states_; }
  std::size_t transitions() const { return transitions_; }

private:
  std::size_t states_;
  std::size_t transitions_;
};

} // namespace tvar
