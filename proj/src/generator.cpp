#include "choo/generator.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string>

namespace choo::gen {

namespace {

constexpr std::array<const char*, 3> kBinders{"x", "y", "z"};
constexpr std::array<const char*, 2> kParams{"p", "q"};
constexpr std::array<const char*, 3> kStore{"a", "b", "c"};
constexpr std::array<const char*, 3> kAtoms{"tom", "bob", "ann"};

std::int64_t uniform(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <class C>
const auto& pick(std::mt19937_64& rng, const C& c) {
  return c[static_cast<std::size_t>(uniform(rng, 0, static_cast<std::int64_t>(c.size()) - 1))];
}

Term random_ground(std::mt19937_64& rng, int depth) {
  const auto r = uniform(rng, 0, 9);
  if (r < 7) return Term::integer(uniform(rng, -1, 4));
  if (r < 8 || depth == 0) return Term::atom(pick(rng, kAtoms));
  return Term::compound("pair", {random_ground(rng, depth - 1), random_ground(rng, depth - 1)});
}

struct Procedure {
  std::string name;
  std::size_t arity;
};

struct Scope {
  std::vector<std::string> logic;
  std::size_t nesting = 0;
  std::vector<Procedure> callable;
};

class ProgramGenerator {
public:
  ProgramGenerator(std::mt19937_64& rng, const ProgramShape& shape) : rng_(rng), shape_(shape) {}

  SourceProgram program() {
    // Procedures own consecutive clauses; procedure k may call only k+1...
    std::vector<Procedure> procs;
    std::vector<std::size_t> owner;
    const auto clause_count = static_cast<std::size_t>(uniform(rng_, 0, static_cast<std::int64_t>(shape_.max_clauses)));
    for (std::size_t i = 0; i < clause_count; ++i) {
      if (procs.empty() || !chance(rng_, 0.35)) {
        procs.push_back({"r" + std::to_string(procs.size()), static_cast<std::size_t>(uniform(rng_, 0, 2))});
      }
      owner.push_back(procs.size() - 1);
    }
    SourceProgram p{{}, cond(RelOp::Eq, int_lit(0), int_lit(0))};
    for (std::size_t i = 0; i < clause_count; ++i) {
      const Procedure& proc = procs[owner[i]];
      Scope scope;
      for (std::size_t k = 0; k < proc.arity; ++k) scope.logic.emplace_back(kParams[k]);
      scope.callable.assign(procs.begin() + static_cast<std::ptrdiff_t>(owner[i]) + 1, procs.end());
      Clause c{proc.name, {}, goal(scope, budget())};
      c.params = scope.logic;
      p.clauses.push_back(std::move(c));
    }
    Scope top;
    top.callable = procs;
    p.main = goal(top, budget());
    return p;
  }

private:
  std::size_t budget() {
    return static_cast<std::size_t>(uniform(rng_, 1, static_cast<std::int64_t>(shape_.max_statements)));
  }

  Goal goal(const Scope& scope, std::size_t budget) {
    if (budget >= 2 && chance(rng_, 0.45)) {
      const auto k = static_cast<std::size_t>(uniform(rng_, 1, static_cast<std::int64_t>(budget) - 1));
      return seq(goal(scope, k), goal(scope, budget - k));
    }
    if (budget >= 2 && scope.nesting < shape_.max_nesting && chance(rng_, 0.5)) {
      Scope inner = scope;
      std::string var = pick(rng_, kBinders);
      inner.logic.push_back(var);
      ++inner.nesting;
      return bounded_choose(var, choice_set(), goal(inner, budget - 1));
    }
    return leaf(scope);
  }

  ChoiceSet choice_set() {
    const auto size = uniform(rng_, 0, static_cast<std::int64_t>(shape_.max_set_size));
    if (chance(rng_, 0.4)) {
      const auto lo = uniform(rng_, -2, 3);
      return ChoiceSet{RangeSet{lo, lo + size - 1}};
    }
    EnumSet s;
    for (std::int64_t i = 0; i < size; ++i) {
      if (!s.elements.empty() && chance(rng_, 0.2)) {
        s.elements.push_back(pick(rng_, s.elements));
      } else {
        s.elements.push_back(random_ground(rng_, 1));
      }
    }
    return ChoiceSet{std::move(s)};
  }

  Goal leaf(const Scope& scope) {
    const auto r = uniform(rng_, 0, 99);
    if (r < 35) return assign(pick(rng_, kStore), value_expr(scope, 2));
    if (r < 55 && !scope.callable.empty()) {
      const Procedure& proc = pick(rng_, scope.callable);
      std::vector<Expr> args;
      for (std::size_t i = 0; i < proc.arity; ++i) args.push_back(value_expr(scope, 1));
      return call(proc.name, std::move(args));
    }
    static constexpr std::array<RelOp, 8> kOps{RelOp::Eq, RelOp::Eq, RelOp::Eq, RelOp::Neq,
                                               RelOp::Neq, RelOp::Lt, RelOp::Le, RelOp::Ge};
    const RelOp op = pick(rng_, kOps);
    if (op == RelOp::Eq && !scope.logic.empty() && chance(rng_, 0.5)) {
      return cond(op, logic_ref(pick(rng_, scope.logic)), int_expr(scope, 0));
    }
    if (op == RelOp::Eq) return cond(op, value_expr(scope, 2), value_expr(scope, 2));
    return cond(op, int_expr(scope, 2), int_expr(scope, 2));
  }

  Expr int_expr(const Scope& scope, int depth) {
    const auto r = uniform(rng_, 0, 99);
    if (r < 35) return int_lit(uniform(rng_, -1, 4));
    if (r < 70 && !scope.logic.empty()) return logic_ref(pick(rng_, scope.logic));
    if (r < 78) return store_ref(pick(rng_, kStore));
    if (depth == 0) return int_lit(uniform(rng_, 0, 3));
    if (r < 90) {
      static constexpr std::array<ArithOp, 3> kOps{ArithOp::Add, ArithOp::Sub, ArithOp::Mul};
      return binop(pick(rng_, kOps), int_expr(scope, depth - 1), int_expr(scope, depth - 1));
    }
    if (r < 94) {
      return binop(ArithOp::Div, int_expr(scope, depth - 1), int_lit(pick(rng_, std::array<int, 4>{1, 2, 3, -2})));
    }
    if (r < 97) return builtin(Builtin::Fib, chance(rng_, 0.8) ? int_lit(uniform(rng_, 1, 8)) : int_expr(scope, 0));
    return builtin(Builtin::Fact, chance(rng_, 0.8) ? int_lit(uniform(rng_, 0, 5)) : int_expr(scope, 0));
  }

  Expr value_expr(const Scope& scope, int depth) {
    const auto r = uniform(rng_, 0, 99);
    if (r < 75) return int_expr(scope, depth);
    if (r < 90 || depth == 0) return term_lit(Term::atom(pick(rng_, kAtoms)));
    return construct("pair", {value_expr(scope, depth - 1), value_expr(scope, depth - 1)});
  }

  std::mt19937_64& rng_;
  const ProgramShape& shape_;
};

void assigned_names(const Goal& g, std::set<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Assign>) {
          out.insert(n.target);
        } else if constexpr (std::is_same_v<N, Seq>) {
          assigned_names(*n.first, out);
          assigned_names(*n.second, out);
        } else if constexpr (std::is_same_v<N, Choose> || std::is_same_v<N, BoundedChoose>) {
          assigned_names(*n.body, out);
        }
      },
      g.node);
}

// A store name that is never assigned would parse back as an atom; make it a
// literal instead so it stays usable in arithmetic.
Expr canonical(const Expr& e, const std::set<std::string>& assigned) {
  return std::visit(
      [&](const auto& n) -> Expr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, VarRef>) {
          if (n.scope == NameScope::Store && !assigned.contains(n.name)) {
            return int_lit(1);
          }
          return e;
        } else if constexpr (std::is_same_v<N, BinOp>) {
          return binop(n.op, canonical(*n.lhs, assigned), canonical(*n.rhs, assigned));
        } else if constexpr (std::is_same_v<N, FunCall>) {
          return builtin(n.fn, canonical(*n.arg, assigned));
        } else if constexpr (std::is_same_v<N, Construct>) {
          std::vector<Expr> args;
          for (const auto& a : n.args) args.push_back(canonical(*a, assigned));
          return construct(n.functor, std::move(args));
        } else {
          return e;
        }
      },
      e.node);
}

Goal canonical(const Goal& g, const std::set<std::string>& assigned) {
  return std::visit(
      [&](const auto& n) -> Goal {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Call>) {
          std::vector<Expr> args;
          for (const auto& a : n.args) args.push_back(canonical(a, assigned));
          return call(n.name, std::move(args));
        } else if constexpr (std::is_same_v<N, Cond>) {
          return cond(n.condition.op, canonical(n.condition.lhs, assigned),
                      canonical(n.condition.rhs, assigned));
        } else if constexpr (std::is_same_v<N, Assign>) {
          return assign(n.target, canonical(n.value, assigned));
        } else if constexpr (std::is_same_v<N, Seq>) {
          return seq(canonical(*n.first, assigned), canonical(*n.second, assigned));
        } else if constexpr (std::is_same_v<N, Choose>) {
          return choose(n.var, canonical(*n.body, assigned));
        } else {
          return bounded_choose(n.var, n.set, canonical(*n.body, assigned));
        }
      },
      g.node);
}

}  // namespace

SourceProgram random_program(std::mt19937_64& rng, const ProgramShape& shape) {
  SourceProgram p = ProgramGenerator(rng, shape).program();
  std::set<std::string> assigned;
  assigned_names(p.main, assigned);
  for (const auto& c : p.clauses) assigned_names(c.body, assigned);
  p.main = canonical(p.main, assigned);
  for (auto& c : p.clauses) c.body = canonical(c.body, assigned);
  return p;
}

namespace {

constexpr std::int64_t kPrintLimit = 1'000'000;

struct Valued {
  Expr expr;
  std::int64_t value;
};

Valued valued_expr(std::mt19937_64& rng, const std::map<std::string, std::int64_t>& vars,
                   int depth) {
  const auto r = uniform(rng, 0, 99);
  if ((r < 40 || depth == 0) && !vars.empty() && r % 2 == 0) {
    auto it = vars.begin();
    std::advance(it, uniform(rng, 0, static_cast<std::int64_t>(vars.size()) - 1));
    return {store_ref(it->first), it->second};
  }
  if (r < 40 || depth == 0) {
    const auto v = uniform(rng, -9, 20);
    return {int_lit(v), v};
  }
  if (r < 90) {
    Valued l = valued_expr(rng, vars, depth - 1);
    Valued rr = valued_expr(rng, vars, depth - 1);
    const auto op = static_cast<int>(uniform(rng, 0, 2));
    const std::int64_t v = op == 0 ? l.value + rr.value : op == 1 ? l.value - rr.value
                                                                  : l.value * rr.value;
    if (v > kPrintLimit || v < -kPrintLimit) return l;
    const ArithOp aop = op == 0 ? ArithOp::Add : op == 1 ? ArithOp::Sub : ArithOp::Mul;
    return {binop(aop, std::move(l.expr), std::move(rr.expr)), v};
  }
  const auto n = uniform(rng, 1, 12);
  std::int64_t a = 0;
  std::int64_t b = 1;
  for (std::int64_t i = 1; i < n; ++i) {
    const std::int64_t next = a + b;
    a = b;
    b = next;
  }
  return {builtin(Builtin::Fib, int_lit(n)), a};
}

}  // namespace

PrintCase random_print_case(std::mt19937_64& rng, std::size_t statements) {
  std::map<std::string, std::int64_t> vars;
  std::vector<Goal> steps;
  const auto count = std::max<std::int64_t>(1, uniform(rng, 1, static_cast<std::int64_t>(statements)));
  for (std::int64_t i = 0; i < count; ++i) {
    if (vars.empty() || chance(rng, 0.6)) {
      const std::string target = pick(rng, std::array<const char*, 4>{"a", "b", "c", "d"});
      Valued v = valued_expr(rng, vars, 2);
      steps.push_back(assign(target, std::move(v.expr)));
      vars[target] = v.value;
    } else {
      Valued l = valued_expr(rng, vars, 1);
      Valued r = valued_expr(rng, vars, 1);
      std::vector<RelOp> holding;
      if (l.value == r.value) holding.push_back(RelOp::Eq);
      if (l.value != r.value) holding.push_back(RelOp::Neq);
      if (l.value < r.value) holding.push_back(RelOp::Lt);
      if (l.value <= r.value) holding.push_back(RelOp::Le);
      if (l.value > r.value) holding.push_back(RelOp::Gt);
      if (l.value >= r.value) holding.push_back(RelOp::Ge);
      steps.push_back(cond(pick(rng, holding), std::move(l.expr), std::move(r.expr)));
    }
  }
  Goal body = steps.back();
  for (std::size_t i = steps.size() - 1; i-- > 0;) body = seq(steps[i], body);
  Valued e = valued_expr(rng, vars, 2);
  return PrintCase{std::move(body), std::move(e.expr), e.value};
}

Term random_term(std::mt19937_64& rng, const std::vector<Term>& vars, std::size_t depth) {
  const auto r = uniform(rng, 0, 99);
  if (r < 30 && !vars.empty()) return pick(rng, vars);
  if (r < 45 || depth == 0) {
    if (chance(rng, 0.5)) return Term::integer(uniform(rng, -3, 3));
    return Term::atom(pick(rng, kAtoms));
  }
  static constexpr std::array<const char*, 3> kFunctors{"f", "g", "h"};
  std::vector<Term> args;
  const auto arity = uniform(rng, 1, 3);
  for (std::int64_t i = 0; i < arity; ++i) args.push_back(random_term(rng, vars, depth - 1));
  return Term::compound(pick(rng, kFunctors), std::move(args));
}

}  // namespace choo::gen
