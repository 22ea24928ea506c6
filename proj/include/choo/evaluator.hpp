#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "choo/ast.hpp"
#include "choo/derivation.hpp"
#include "choo/term.hpp"

namespace choo {

/// Raised for overflow, division by zero, non-ground arithmetic, comparing
/// non-integers with an ordering operator, and calls to undefined procedures.
class RuntimeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UndefinedProcedure : public RuntimeError {
public:
  using RuntimeError::RuntimeError;
};

/// The search hit its horizon. Derivations may exist beyond it.
class BudgetExhausted : public std::runtime_error {
public:
  enum class Limit { Depth, Steps };
  BudgetExhausted(Limit which, std::uint64_t bound);
  Limit which() const { return which_; }

private:
  Limit which_;
};

struct SearchBudget {
  std::uint64_t max_depth = 10'000;
  std::uint64_t max_steps = 1'000'000;
};

struct Witness {
  std::string name;
  std::optional<Term> value;  // nullopt: any term would do

  bool operator==(const Witness&) const = default;
};

/// One successful derivation.
struct Outcome {
  std::map<std::string, Term> store;
  std::vector<Witness> witnesses;  // binder entry order
  std::optional<DerivationNode> derivation;

  bool operator==(const Outcome&) const = default;
};

struct TraceEvent {
  enum class Kind { Rule, Fail };
  Kind kind;
  int rule;  // 0 for failures
  std::uint64_t depth;
  std::string text;
};

struct ExecOptions {
  SearchBudget budget;
  bool record_derivations = false;
  std::function<void(const TraceEvent&)> trace;
};

enum class SearchControl { Continue, Stop };

/// Clauses plus the mutable machine state: store, logic bindings, and the
/// trail that lets backtracking undo both.
class ProgramState {
public:
  struct StoreWrite {
    std::string name;
    std::optional<Term> previous;
  };
  using TrailEntry = std::variant<VarId, StoreWrite>;

  explicit ProgramState(std::vector<Clause> clauses = {});

  const std::vector<Clause>& clauses() const { return clauses_; }
  /// Indexes of the clauses named `name` with `arity` params, program order.
  const std::vector<std::size_t>* clauses_for(const std::string& name, std::size_t arity) const;

  const std::map<std::string, Term>& store() const { return store_; }
  const Substitution& bindings() const { return bindings_; }
  std::size_t trail_size() const { return trail_.size(); }
  VarId next_var_id() const { return next_var_; }

  /// Store writes are trailed. Throws RuntimeError if `value` is not ground.
  void write(const std::string& name, Term value);
  /// Trailed unification.
  bool unify(const Term& a, const Term& b);
  Term fresh_var(const std::string& display_name);

  std::size_t mark() const { return trail_.size(); }
  void undo_to(std::size_t mark);
  void reset_var_counter(VarId next) { next_var_ = next; }

  struct Snapshot {
    std::map<std::string, Term> store;
    std::map<VarId, Term> bindings;
    std::size_t trail_size;
    VarId next_var;
    bool operator==(const Snapshot&) const = default;
  };
  Snapshot snapshot() const;

private:
  std::vector<Clause> clauses_;
  std::map<std::pair<std::string, std::size_t>, std::vector<std::size_t>> index_;
  std::map<std::string, Term> store_;
  Substitution bindings_;
  std::vector<TrailEntry> trail_;
  VarId next_var_ = 1;
};

/// Result of evaluating an expression: a term, or failure (an unset store
/// variable was read).
using EvalResult = std::optional<Term>;

/// Terms may contain logic variables unless arithmetic is involved; bound
/// ones below the top are left in place, so apply the bindings to resolve.
EvalResult eval_expr(const ProgramState& state, const Expr& e);

std::int64_t fib(std::int64_t n);
std::int64_t fact(std::int64_t n);

/// Depth-first enumeration of every derivation of `goal`, in clause order
/// and set order. `on_outcome` decides whether to keep searching. The state
/// is fully restored before this returns or throws.
void execute(ProgramState& state, const Goal& goal, const ExecOptions& options,
             const std::function<SearchControl(const Outcome&)>& on_outcome);

std::vector<Outcome> execute_all(ProgramState& state, const Goal& goal,
                                 const ExecOptions& options = {});
std::optional<Outcome> execute_first(ProgramState& state, const Goal& goal,
                                     const ExecOptions& options = {});

}  // namespace choo
