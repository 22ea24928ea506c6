#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "choo/term.hpp"

namespace choo {

/// Shared, immutable pointer to a recursive AST node with value equality.
template <class T>
class Box {
public:
  Box(T value) : ptr_(std::make_shared<const T>(std::move(value))) {}  // NOLINT

  const T& operator*() const { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }
  bool same_node(const Box& other) const { return ptr_ == other.ptr_; }

  friend bool operator==(const Box& a, const Box& b) {
    return a.ptr_ == b.ptr_ || *a.ptr_ == *b.ptr_;
  }

private:
  std::shared_ptr<const T> ptr_;
};

// ---------------------------------------------------------------- expressions

struct Expr;

enum class ArithOp { Add, Sub, Mul, Div };
enum class Builtin { Fib, Fact };

/// Identifiers are classified while parsing: names bound by `choose` or a
/// clause parameter are logic variables, assignment targets are store
/// variables, everything else is an atom.
enum class NameScope { Logic, Store };

struct IntLit {
  std::int64_t value;
  bool operator==(const IntLit&) const = default;
};

struct VarRef {
  std::string name;
  NameScope scope;
  bool operator==(const VarRef&) const = default;
};

struct BinOp {
  ArithOp op;
  Box<Expr> lhs;
  Box<Expr> rhs;
  bool operator==(const BinOp&) const = default;
};

struct FunCall {
  Builtin fn;
  Box<Expr> arg;
  bool operator==(const FunCall&) const = default;
};

/// A term value spliced into an expression, e.g. an atom or the value a
/// choice variable was replaced by.
struct TermLit {
  Term term;
  bool operator==(const TermLit&) const = default;
};

/// `f(e1, ..., en)` in expression position; builds a compound term.
struct Construct {
  std::string functor;
  std::vector<Box<Expr>> args;
  bool operator==(const Construct&) const = default;
};

struct Expr {
  std::variant<IntLit, VarRef, BinOp, FunCall, TermLit, Construct> node;
  bool operator==(const Expr&) const = default;
};

Expr int_lit(std::int64_t v);
Expr logic_ref(std::string name);
Expr store_ref(std::string name);
Expr binop(ArithOp op, Expr lhs, Expr rhs);
Expr builtin(Builtin fn, Expr arg);
/// Int terms become IntLit so substituted integers print and compare like
/// literals.
Expr term_lit(Term t);
Expr construct(std::string functor, std::vector<Expr> args);

// ---------------------------------------------------------------- conditions

enum class RelOp { Eq, Neq, Lt, Le, Gt, Ge };

struct Condition {
  RelOp op;
  Expr lhs;
  Expr rhs;
  bool operator==(const Condition&) const = default;
};

// ---------------------------------------------------------------- choice sets

struct RangeSet {
  std::int64_t lo;
  std::int64_t hi;  // inclusive; lo > hi is the empty set
  bool operator==(const RangeSet&) const = default;
};

struct EnumSet {
  std::vector<Term> elements;  // ground, written order, may repeat
  bool operator==(const EnumSet&) const = default;
};

struct ChoiceSet {
  std::variant<RangeSet, EnumSet> node;
  bool operator==(const ChoiceSet&) const = default;
};

/// Elements of an enumerated set in canonical order, first occurrence wins.
std::vector<Term> distinct_elements(const EnumSet& s);

// ---------------------------------------------------------------- goals

struct Goal;

struct Call {
  std::string name;
  std::vector<Expr> args;
  bool operator==(const Call&) const = default;
};

struct Cond {
  Condition condition;
  bool operator==(const Cond&) const = default;
};

struct Assign {
  std::string target;  // store variable
  Expr value;
  bool operator==(const Assign&) const = default;
};

struct Seq {
  Box<Goal> first;
  Box<Goal> second;
  bool operator==(const Seq&) const = default;
};

struct Choose {
  std::string var;
  Box<Goal> body;
  bool operator==(const Choose&) const = default;
};

struct BoundedChoose {
  std::string var;
  ChoiceSet set;
  Box<Goal> body;
  bool operator==(const BoundedChoose&) const = default;
};

struct Goal {
  std::variant<Call, Cond, Assign, Seq, Choose, BoundedChoose> node;
  bool operator==(const Goal&) const = default;
};

Goal call(std::string name, std::vector<Expr> args);
Goal cond(RelOp op, Expr lhs, Expr rhs);
Goal assign(std::string target, Expr value);
Goal seq(Goal first, Goal second);
Goal choose(std::string var, Goal body);
Goal bounded_choose(std::string var, ChoiceSet set, Goal body);

/// Procedure definition `name(params) { body }`, universally quantified over
/// its parameters.
struct Clause {
  std::string name;
  std::vector<std::string> params;
  Goal body;
  bool operator==(const Clause&) const = default;
};

struct SourceProgram {
  std::vector<Clause> clauses;
  Goal main;
  bool operator==(const SourceProgram&) const = default;
};

// ---------------------------------------------------------------- operations

/// [t/var]g: replaces free logic occurrences of `var`. Binders of the same
/// name shadow. Subtrees without an occurrence are shared, not copied.
Goal subst_goal(const Goal& g, const std::string& var, const Term& t);
/// General form; substituting `logic_ref(var)` for `var` is the identity.
Goal subst_goal(const Goal& g, const std::string& var, const Expr& replacement);
Expr subst_expr(const Expr& e, const std::string& var, const Expr& replacement);

/// Logic-scoped names occurring free in g. Store targets are not included.
std::set<std::string> free_vars_goal(const Goal& g);
std::set<std::string> free_vars_expr(const Expr& e);

/// Logic variables embedded as term values (after substitution).
std::set<VarId> term_vars_goal(const Goal& g);

/// Number of Choose/BoundedChoose nodes.
std::size_t binder_count(const Goal& g);

// ---------------------------------------------------------------- printing

/// Concrete syntax that parses back to the same tree. Logic variables
/// embedded as terms print as `_G<id>`.
std::string to_source(const Expr& e);
std::string to_source(const Condition& c);
std::string to_source(const ChoiceSet& s);
std::string to_source(const Goal& g);
std::string to_source(const Clause& c);
std::string to_source(const SourceProgram& p);

/// Indented tree dump, one node per line.
std::string dump(const SourceProgram& p);

const char* to_string(RelOp op);
const char* to_string(ArithOp op);
const char* to_string(Builtin fn);

}  // namespace choo
