#pragma once

#include <cstdint>
#include <random>

#include "choo/ast.hpp"

// Seeded random programs for differential and property testing.
namespace choo::gen {

struct ProgramShape {
  std::size_t max_statements = 8;  // per goal, counting binders
  std::size_t max_nesting = 3;     // nested choose depth
  std::size_t max_set_size = 4;
  std::size_t max_clauses = 3;
};

/// Only bounded choices; clause i only calls clauses j > i, so every
/// program terminates. The result is in canonical form:
/// parse_program(to_source(p)) == p.
SourceProgram random_program(std::mt19937_64& rng, const ProgramShape& shape = {});

/// A straight-line goal of assignments and true ground conditions, plus a
/// closed expression over the variables it assigns. `expected` is the value
/// of `expr` after running `body`, tracked while generating.
struct PrintCase {
  Goal body;
  Expr expr;
  std::int64_t expected;
};

PrintCase random_print_case(std::mt19937_64& rng, std::size_t statements = 6);

/// Random term over a few atoms, small integers, and the given variables.
Term random_term(std::mt19937_64& rng, const std::vector<Term>& vars, std::size_t depth);

}  // namespace choo::gen
