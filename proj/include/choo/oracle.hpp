#pragma once

#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "choo/ast.hpp"
#include "choo/derivation.hpp"
#include "choo/term.hpp"

// Brute-force enumeration of every derivation of a small program. Shares
// nothing with the evaluator's search: goals are run against an explicit
// environment instead of by substitution, every alternative is explored,
// and results are collected as a set.
namespace choo::oracle {

/// The program is outside what the enumerator can decide.
class OutOfBounds : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct OracleBounds {
  std::size_t max_height = 256;
  std::size_t max_set_size = 10'000;
};

using Store = std::map<std::string, Term>;
using WitnessList = std::vector<std::pair<std::string, Term>>;

struct Result {
  Store store;
  WitnessList witnesses;
  DerivationNode derivation;
};

struct Enumeration {
  /// Distinct (store, witnesses) pairs with one derivation each, ordered by key.
  std::vector<Result> results;
  /// Some explored path raised a runtime error (overflow, bad operand,
  /// undefined procedure, ...).
  bool runtime_error = false;
  std::string error;
};

/// Throws OutOfBounds when the height cap is hit, a set is too large, or an
/// unbounded choice is not pinned by an `==` against a closed expression.
Enumeration enumerate(const std::vector<Clause>& clauses, const Store& initial,
                      const Goal& goal, const OracleBounds& bounds = {});

/// Canonical text for one solution: `x=6,y=_ | a=1,b=2`.
std::string solution_key(const Store& store, const WitnessList& witnesses);

struct EquivalenceReport {
  enum class Verdict { Match, Mismatch, OutOfBounds };
  Verdict verdict = Verdict::Match;
  std::string program_text;
  std::set<std::string> evaluator;
  std::set<std::string> oracle;
  std::string evaluator_error;  // non-empty when the evaluator raised
  std::string oracle_error;
  std::string counterexample;   // shrunk program text, mismatches only

  std::string describe() const;
};

/// Runs both sides in all-solutions mode and compares solution sets. Two
/// runs that both raise a runtime error count as a match. Never throws.
EquivalenceReport check_equivalence(const SourceProgram& program,
                                    const OracleBounds& bounds = {});

/// Greedy reduction: repeatedly applies the first simplification for which
/// `still_failing` holds until none does.
SourceProgram shrink(const SourceProgram& program,
                     const std::function<bool(const SourceProgram&)>& still_failing);

}  // namespace choo::oracle
