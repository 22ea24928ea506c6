#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace choo {

using VarId = std::uint64_t;

class Term;

struct LogicVar {
  VarId id;
  std::string name;  // display name, usually the binder it was created for
};

struct Atom {
  std::string name;
};

struct Int {
  std::int64_t value;
};

struct Compound {
  std::string functor;
  std::vector<Term> args;  // never empty; zero-arity symbols are atoms
};

/// First-order term. Immutable and cheap to copy: nodes are shared.
class Term {
public:
  using Node = std::variant<LogicVar, Atom, Int, Compound>;

  static Term var(VarId id, std::string name = {});
  static Term atom(std::string name);
  static Term integer(std::int64_t value);
  /// Throws std::invalid_argument when `args` is empty.
  static Term compound(std::string functor, std::vector<Term> args);

  const Node& node() const { return *node_; }

  bool is_var() const { return std::holds_alternative<LogicVar>(*node_); }
  bool is_atom() const { return std::holds_alternative<Atom>(*node_); }
  bool is_int() const { return std::holds_alternative<Int>(*node_); }
  bool is_compound() const { return std::holds_alternative<Compound>(*node_); }

  const LogicVar& as_var() const { return std::get<LogicVar>(*node_); }
  const Atom& as_atom() const { return std::get<Atom>(*node_); }
  std::int64_t as_int() const { return std::get<Int>(*node_).value; }
  const Compound& as_compound() const { return std::get<Compound>(*node_); }

  /// Structural equality; variables compare by id.
  friend bool operator==(const Term& a, const Term& b);

  bool same_node(const Term& other) const { return node_ == other.node_; }

private:
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// True when no variables occur in `t` (bindings are not consulted).
bool is_ground(const Term& t);

/// Logic-variable bindings in triangular form: a bound variable may map to
/// a term that mentions other bound variables. `apply` chases to fixpoint.
class Substitution {
public:
  Substitution() = default;

  std::optional<Term> lookup(VarId id) const;
  bool is_bound(VarId id) const { return bindings_.contains(id); }
  std::size_t size() const { return bindings_.size(); }
  bool empty() const { return bindings_.empty(); }

  /// Adds id -> t. The caller guarantees id is unbound and occurs-clean.
  void bind(VarId id, Term t);
  void unbind(VarId id);

  /// Dereferences a chain of bound variables.
  Term walk(Term t) const;

  std::map<VarId, Term> sorted_bindings() const;

  friend bool operator==(const Substitution& a, const Substitution& b) {
    return a.bindings_ == b.bindings_;
  }

private:
  std::unordered_map<VarId, Term> bindings_;
};

Term apply(const Substitution& s, const Term& t);

bool occurs(VarId v, const Term& t, const Substitution& s);
inline bool occurs(VarId v, const Term& t) { return occurs(v, t, Substitution{}); }

/// Unbound variables of `t` under `s`, ordered by id.
std::set<VarId> free_vars(const Term& t, const Substitution& s);
inline std::set<VarId> free_vars(const Term& t) { return free_vars(t, Substitution{}); }

/// Most general unifier of a and b extending s, or nullopt. Occurs check on.
std::optional<Substitution> unify(const Term& a, const Term& b, Substitution s);

/// In-place variant used by the search engine. Every variable bound by the
/// call is appended to `newly_bound`, including on failure, so the caller can
/// undo a partial unification.
bool unify_in_place(const Term& a, const Term& b, Substitution& s,
                    std::vector<VarId>& newly_bound);

/// Renders terms canonically: atoms bare, integers in decimal, compounds as
/// `f(a,b)`. Unbound variables print as `_G<n>`, numbered by first
/// appearance across every call made on the same formatter.
class TermFormatter {
public:
  std::string format(const Term& t);

private:
  void write(const Term& t, std::string& out);
  std::map<VarId, std::size_t> numbering_;
};

std::string format_term(const Term& t);

}  // namespace choo
