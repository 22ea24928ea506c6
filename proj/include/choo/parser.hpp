#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "choo/ast.hpp"

namespace choo {

/// First error found in a source text. Positions are 1-based; columns count
/// code points.
class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, std::size_t column, std::string expected, std::string found);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& expected() const { return expected_; }
  const std::string& found() const { return found_; }

private:
  std::size_t line_;
  std::size_t column_;
  std::string expected_;
  std::string found_;
};

/// program := clause* "main" "{" goal "}"
///
/// Identifiers are classified while parsing: a name bound by an enclosing
/// `choose` or a clause parameter is a logic variable; a name that is the
/// target of an assignment anywhere in the text is a store variable;
/// any other name is an atom. Assigning to a logic variable is reported as
/// a ParseError. Throws ParseError.
SourceProgram parse_program(std::string_view source);

/// A single goal with no clauses around it. Throws ParseError.
Goal parse_goal(std::string_view source);

/// A ground term in canonical syntax, e.g. `tuple(tom,31,male)` or `-5`.
/// Throws ParseError.
Term parse_term(std::string_view source);

bool is_reserved(std::string_view word);

}  // namespace choo
