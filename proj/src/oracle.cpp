#include "choo/oracle.hpp"

#include <algorithm>
#include <limits>
#include <optional>

#include "choo/evaluator.hpp"

namespace choo::oracle {

namespace {

class RuntimeFault : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using Env = std::map<std::string, Term>;

// Structural equality on ground terms, written out here rather than
// borrowed from unification.
bool same(const Term& a, const Term& b) {
  if (a.is_int() && b.is_int()) return a.as_int() == b.as_int();
  if (a.is_atom() && b.is_atom()) return a.as_atom().name == b.as_atom().name;
  if (a.is_compound() && b.is_compound()) {
    const auto& x = a.as_compound();
    const auto& y = b.as_compound();
    if (x.functor != y.functor || x.args.size() != y.args.size()) return false;
    for (std::size_t i = 0; i < x.args.size(); ++i) {
      if (!same(x.args[i], y.args[i])) return false;
    }
    return true;
  }
  return false;
}

Term fits(__int128 v) {
  if (v < std::numeric_limits<std::int64_t>::min() || v > std::numeric_limits<std::int64_t>::max()) {
    throw RuntimeFault("integer overflow");
  }
  return Term::integer(static_cast<std::int64_t>(v));
}

std::int64_t integer_of(const Term& t) {
  if (!t.is_int()) throw RuntimeFault("non-integer operand " + format_term(t));
  return t.as_int();
}

Term fib_value(std::int64_t n) {
  if (n < 1) throw RuntimeFault("fib of non-positive argument");
  __int128 a = 0;
  __int128 b = 1;
  for (std::int64_t i = 1; i < n; ++i) {
    const __int128 next = a + b;
    a = b;
    b = next;
    if (a > std::numeric_limits<std::int64_t>::max()) throw RuntimeFault("integer overflow");
  }
  return fits(a);
}

Term fact_value(std::int64_t n) {
  if (n < 0) throw RuntimeFault("fact of negative argument");
  __int128 acc = 1;
  for (std::int64_t i = 2; i <= n; ++i) {
    acc *= i;
    if (acc > std::numeric_limits<std::int64_t>::max()) throw RuntimeFault("integer overflow");
  }
  return fits(acc);
}

struct Partial {
  Store store;
  WitnessList witnesses;
  DerivationNode node;
};

class Enumerator {
public:
  Enumerator(const std::vector<Clause>& clauses, const OracleBounds& bounds)
      : clauses_(clauses), bounds_(bounds) {}

  std::vector<Partial> derive(const Env& env, const Store& store, const Goal& g,
                              std::size_t height) {
    if (height > bounds_.max_height) {
      throw OutOfBounds("derivation height exceeds " + std::to_string(bounds_.max_height));
    }
    return std::visit([&](const auto& n) { return derive_node(n, env, store, g, height); },
                      g.node);
  }

  // nullopt: evaluation failed (unset store variable).
  std::optional<Term> eval(const Env& env, const Store& store, const Expr& e) {
    return std::visit(
        [&](const auto& n) -> std::optional<Term> {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, IntLit>) {
            return Term::integer(n.value);
          } else if constexpr (std::is_same_v<N, VarRef>) {
            const auto& table = n.scope == NameScope::Logic ? env : store;
            auto it = table.find(n.name);
            if (it != table.end()) return it->second;
            if (n.scope == NameScope::Logic) throw OutOfBounds("unbound logic name " + n.name);
            return std::nullopt;
          } else if constexpr (std::is_same_v<N, TermLit>) {
            if (!is_ground(n.term)) throw OutOfBounds("non-ground term literal");
            return n.term;
          } else if constexpr (std::is_same_v<N, Construct>) {
            std::vector<Term> args;
            for (const auto& a : n.args) {
              auto v = eval(env, store, *a);
              if (!v) return std::nullopt;
              args.push_back(*v);
            }
            return Term::compound(n.functor, std::move(args));
          } else if constexpr (std::is_same_v<N, BinOp>) {
            auto l = eval(env, store, *n.lhs);
            if (!l) return std::nullopt;
            auto r = eval(env, store, *n.rhs);
            if (!r) return std::nullopt;
            const __int128 a = integer_of(*l);
            const __int128 b = integer_of(*r);
            switch (n.op) {
              case ArithOp::Add: return fits(a + b);
              case ArithOp::Sub: return fits(a - b);
              case ArithOp::Mul: return fits(a * b);
              case ArithOp::Div:
                if (b == 0) throw RuntimeFault("division by zero");
                return fits(a / b);
            }
            return std::nullopt;
          } else {
            auto a = eval(env, store, *n.arg);
            if (!a) return std::nullopt;
            const std::int64_t v = integer_of(*a);
            return n.fn == Builtin::Fib ? fib_value(v) : fact_value(v);
          }
        },
        e.node);
  }

private:
  static std::string conclusion(const Goal& g) { return "ex(P, " + to_source(g) + ")"; }

  std::vector<Partial> derive_node(const Cond& n, const Env& env, const Store& store,
                                   const Goal& g, std::size_t) {
    const auto& c = n.condition;
    auto l = eval(env, store, c.lhs);
    if (!l) return {};
    auto r = eval(env, store, c.rhs);
    if (!r) return {};
    bool holds = false;
    if (c.op == RelOp::Eq) {
      holds = same(*l, *r);
    } else {
      const std::int64_t a = integer_of(*l);
      const std::int64_t b = integer_of(*r);
      holds = (c.op == RelOp::Neq && a != b) || (c.op == RelOp::Lt && a < b) ||
              (c.op == RelOp::Le && a <= b) || (c.op == RelOp::Gt && a > b) ||
              (c.op == RelOp::Ge && a >= b);
    }
    if (!holds) return {};
    return {Partial{store, {}, DerivationNode{Rule::Condition, conclusion(g), {}}}};
  }

  std::vector<Partial> derive_node(const Assign& n, const Env& env, const Store& store,
                                   const Goal& g, std::size_t) {
    auto v = eval(env, store, n.value);
    if (!v) return {};
    Store next = store;
    next.insert_or_assign(n.target, *v);
    return {Partial{std::move(next), {}, DerivationNode{Rule::Assignment, conclusion(g), {}}}};
  }

  std::vector<Partial> derive_node(const Seq& n, const Env& env, const Store& store,
                                   const Goal& g, std::size_t height) {
    std::vector<Partial> out;
    for (auto& first : derive(env, store, *n.first, height + 1)) {
      for (auto& second : derive(env, first.store, *n.second, height + 1)) {
        WitnessList w = first.witnesses;
        w.insert(w.end(), second.witnesses.begin(), second.witnesses.end());
        out.push_back(Partial{std::move(second.store), std::move(w),
                              DerivationNode{Rule::Sequence, conclusion(g),
                                             {first.node, std::move(second.node)}}});
      }
    }
    return out;
  }

  std::vector<Partial> with_each(const std::string& var, const std::vector<Term>& candidates,
                                 const Goal& body, Rule rule, const Env& env,
                                 const Store& store, const Goal& g, std::size_t height) {
    std::vector<Partial> out;
    for (const auto& t : candidates) {
      Env inner = env;
      inner.insert_or_assign(var, t);
      for (auto& p : derive(inner, store, body, height + 1)) {
        WitnessList w{{var, t}};
        w.insert(w.end(), p.witnesses.begin(), p.witnesses.end());
        out.push_back(Partial{std::move(p.store), std::move(w),
                              DerivationNode{rule,
                                             conclusion(g) + " with " + var + " := " +
                                                 format_term(t),
                                             {std::move(p.node)}}});
      }
    }
    return out;
  }

  std::vector<Partial> derive_node(const BoundedChoose& n, const Env& env, const Store& store,
                                   const Goal& g, std::size_t height) {
    std::vector<Term> elements;
    if (const auto* r = std::get_if<RangeSet>(&n.set.node)) {
      if (r->lo <= r->hi) {
        const __int128 size = static_cast<__int128>(r->hi) - r->lo + 1;
        if (size > static_cast<__int128>(bounds_.max_set_size)) {
          throw OutOfBounds("choice set larger than " + std::to_string(bounds_.max_set_size));
        }
        for (__int128 v = r->lo; v <= r->hi; ++v) {
          elements.push_back(Term::integer(static_cast<std::int64_t>(v)));
        }
      }
    } else {
      for (const auto& t : std::get<EnumSet>(n.set.node).elements) {
        const bool seen = std::any_of(elements.begin(), elements.end(),
                                      [&](const Term& e) { return same(e, t); });
        if (!seen) elements.push_back(t);
      }
    }
    return with_each(n.var, elements, *n.body, Rule::BoundedChoose, env, store, g, height);
  }

  std::vector<Partial> derive_node(const Choose& n, const Env& env, const Store& store,
                                   const Goal& g, std::size_t height) {
    std::vector<Term> candidates;
    collect_pins(*n.body, n.var, env, {}, candidates);
    if (candidates.empty()) {
      throw OutOfBounds("unbounded choose(" + n.var +
                        ") is not pinned by an equality with a closed expression");
    }
    return with_each(n.var, candidates, *n.body, Rule::Choose, env, store, g, height);
  }

  std::vector<Partial> derive_node(const Call& n, const Env& env, const Store& store,
                                   const Goal& g, std::size_t height) {
    std::vector<const Clause*> matching;
    for (const auto& c : clauses_) {
      if (c.name == n.name && c.params.size() == n.args.size()) matching.push_back(&c);
    }
    if (matching.empty()) throw RuntimeFault("undefined procedure " + n.name);
    std::vector<Term> args;
    for (const auto& a : n.args) {
      auto v = eval(env, store, a);
      if (!v) return {};
      args.push_back(*v);
    }
    std::vector<Partial> out;
    const std::size_t arity = args.size();
    for (const Clause* c : matching) {
      Env callee;
      for (std::size_t i = 0; i < arity; ++i) callee.insert_or_assign(c->params[i], args[i]);
      for (auto& p : derive(callee, store, c->body, height + arity + 2)) {
        DerivationNode node{Rule::Backchain, "ex(" + to_source(*c) + ";P, " + to_source(g) + ")",
                            {std::move(p.node)}};
        for (std::size_t i = arity; i-- > 0;) {
          node = DerivationNode{Rule::Instantiate,
                                "ex(forall " + c->params[i] + " D;P, " + to_source(g) + ") with " +
                                    c->params[i] + " := " + format_term(args[i]),
                                {std::move(node)}};
        }
        out.push_back(Partial{std::move(p.store), std::move(p.witnesses),
                              DerivationNode{Rule::CallClause, conclusion(g), {std::move(node)}}});
      }
    }
    return out;
  }

  // Values `var` is forced to by some `pattern == closed` condition that
  // every derivation of `body` must pass.
  void collect_pins(const Goal& body, const std::string& var, const Env& env,
                    std::set<std::string> hidden, std::vector<Term>& out) {
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Seq>) {
            collect_pins(*n.first, var, env, hidden, out);
            collect_pins(*n.second, var, env, hidden, out);
          } else if constexpr (std::is_same_v<N, Choose> || std::is_same_v<N, BoundedChoose>) {
            if (n.var == var) return;
            hidden.insert(n.var);
            collect_pins(*n.body, var, env, hidden, out);
          } else if constexpr (std::is_same_v<N, Cond>) {
            if (n.condition.op != RelOp::Eq) return;
            pin_from(n.condition.lhs, n.condition.rhs, var, env, hidden, out);
            pin_from(n.condition.rhs, n.condition.lhs, var, env, hidden, out);
          }
        },
        body.node);
  }

  static bool closed(const Expr& e, const Env& env, const std::set<std::string>& hidden,
                     const std::string& var) {
    return std::visit(
        [&](const auto& n) -> bool {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, VarRef>) {
            return n.scope == NameScope::Logic && n.name != var && !hidden.contains(n.name) &&
                   env.contains(n.name);
          } else if constexpr (std::is_same_v<N, BinOp>) {
            return closed(*n.lhs, env, hidden, var) && closed(*n.rhs, env, hidden, var);
          } else if constexpr (std::is_same_v<N, FunCall>) {
            return closed(*n.arg, env, hidden, var);
          } else if constexpr (std::is_same_v<N, Construct>) {
            return std::all_of(n.args.begin(), n.args.end(),
                               [&](const Box<Expr>& a) { return closed(*a, env, hidden, var); });
          } else if constexpr (std::is_same_v<N, TermLit>) {
            return is_ground(n.term);
          } else {
            return true;
          }
        },
        e.node);
  }

  void pin_from(const Expr& pattern, const Expr& other, const std::string& var, const Env& env,
                const std::set<std::string>& hidden, std::vector<Term>& out) {
    if (!closed(other, env, hidden, var)) return;
    std::optional<Term> value;
    try {
      value = eval(env, Store{}, other);
    } catch (const RuntimeFault&) {
      return;
    }
    if (value) match(pattern, *value, var, out);
  }

  static void match(const Expr& pattern, const Term& value, const std::string& var,
                    std::vector<Term>& out) {
    if (const auto* v = std::get_if<VarRef>(&pattern.node)) {
      if (v->scope == NameScope::Logic && v->name == var &&
          std::none_of(out.begin(), out.end(), [&](const Term& t) { return same(t, value); })) {
        out.push_back(value);
      }
      return;
    }
    if (const auto* c = std::get_if<Construct>(&pattern.node)) {
      if (!value.is_compound()) return;
      const auto& vc = value.as_compound();
      if (vc.functor != c->functor || vc.args.size() != c->args.size()) return;
      for (std::size_t i = 0; i < c->args.size(); ++i) match(*c->args[i], vc.args[i], var, out);
    }
  }

  const std::vector<Clause>& clauses_;
  const OracleBounds& bounds_;
};

std::string key_of(const Store& store, const std::vector<std::pair<std::string, std::string>>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ',';
    s += w[i].first + "=" + w[i].second;
  }
  s += " | ";
  bool first = true;
  for (const auto& [name, value] : store) {
    if (!first) s += ',';
    first = false;
    s += name + "=" + format_term(value);
  }
  return s;
}

std::string key_of(const Outcome& o) {
  TermFormatter fmt;
  std::vector<std::pair<std::string, std::string>> w;
  for (const auto& wit : o.witnesses) {
    w.emplace_back(wit.name, wit.value ? fmt.format(*wit.value) : "_");
  }
  return key_of(o.store, w);
}

EquivalenceReport compare(const SourceProgram& program, const OracleBounds& bounds) {
  EquivalenceReport report;
  report.program_text = to_source(program);
  bool oracle_raised = false;
  try {
    Enumeration en = enumerate(program.clauses, {}, program.main, bounds);
    oracle_raised = en.runtime_error;
    report.oracle_error = en.error;
    for (const auto& r : en.results) report.oracle.insert(solution_key(r.store, r.witnesses));
  } catch (const OutOfBounds& e) {
    report.verdict = EquivalenceReport::Verdict::OutOfBounds;
    report.oracle_error = e.what();
    return report;
  }

  bool evaluator_raised = false;
  bool evaluator_gave_up = false;
  try {
    ProgramState state(program.clauses);
    for (const auto& o : execute_all(state, program.main)) report.evaluator.insert(key_of(o));
  } catch (const RuntimeError& e) {
    evaluator_raised = true;
    report.evaluator_error = e.what();
  } catch (const BudgetExhausted& e) {
    evaluator_gave_up = true;
    report.evaluator_error = e.what();
  }

  bool match = false;
  if (evaluator_gave_up) {
    match = false;
  } else if (evaluator_raised || oracle_raised) {
    match = evaluator_raised && oracle_raised;
    if (match) {
      report.evaluator.clear();
      report.oracle.clear();
    }
  } else {
    match = report.evaluator == report.oracle;
  }
  report.verdict = match ? EquivalenceReport::Verdict::Match : EquivalenceReport::Verdict::Mismatch;
  return report;
}

// ---------------------------------------------------------------- shrinking

Goal trivial_goal() { return cond(RelOp::Eq, int_lit(0), int_lit(0)); }

std::vector<Goal> reductions(const Goal& g) {
  std::vector<Goal> out;
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Seq>) {
          out.push_back(*n.first);
          out.push_back(*n.second);
          for (auto& r : reductions(*n.first)) out.push_back(seq(std::move(r), *n.second));
          for (auto& r : reductions(*n.second)) out.push_back(seq(*n.first, std::move(r)));
        } else if constexpr (std::is_same_v<N, Choose>) {
          if (!free_vars_goal(*n.body).contains(n.var)) out.push_back(*n.body);
          for (auto& r : reductions(*n.body)) out.push_back(choose(n.var, std::move(r)));
        } else if constexpr (std::is_same_v<N, BoundedChoose>) {
          if (!free_vars_goal(*n.body).contains(n.var)) out.push_back(*n.body);
          if (const auto* r = std::get_if<RangeSet>(&n.set.node)) {
            if (r->lo <= r->hi) {
              out.push_back(bounded_choose(n.var, ChoiceSet{RangeSet{r->lo, r->hi - 1}}, *n.body));
              if (r->lo < r->hi) {
                out.push_back(bounded_choose(n.var, ChoiceSet{RangeSet{r->lo + 1, r->hi}}, *n.body));
              }
            }
          } else {
            const auto& elems = std::get<EnumSet>(n.set.node).elements;
            for (std::size_t i = 0; i < elems.size(); ++i) {
              EnumSet smaller{elems};
              smaller.elements.erase(smaller.elements.begin() + static_cast<std::ptrdiff_t>(i));
              out.push_back(bounded_choose(n.var, ChoiceSet{std::move(smaller)}, *n.body));
            }
          }
          for (auto& r : reductions(*n.body)) out.push_back(bounded_choose(n.var, n.set, std::move(r)));
        } else {
          if (!(g == trivial_goal())) out.push_back(trivial_goal());
          if constexpr (std::is_same_v<N, Assign>) {
            if (!(n.value == int_lit(0))) out.push_back(assign(n.target, int_lit(0)));
          }
        }
      },
      g.node);
  return out;
}

std::vector<SourceProgram> program_reductions(const SourceProgram& p) {
  std::vector<SourceProgram> out;
  for (std::size_t i = 0; i < p.clauses.size(); ++i) {
    SourceProgram q = p;
    q.clauses.erase(q.clauses.begin() + static_cast<std::ptrdiff_t>(i));
    out.push_back(std::move(q));
  }
  for (auto& r : reductions(p.main)) out.push_back(SourceProgram{p.clauses, std::move(r)});
  for (std::size_t i = 0; i < p.clauses.size(); ++i) {
    for (auto& r : reductions(p.clauses[i].body)) {
      SourceProgram q = p;
      q.clauses[i].body = std::move(r);
      out.push_back(std::move(q));
    }
  }
  return out;
}

}  // namespace

Enumeration enumerate(const std::vector<Clause>& clauses, const Store& initial, const Goal& goal,
                      const OracleBounds& bounds) {
  Enumerator en(clauses, bounds);
  Enumeration out;
  std::vector<Partial> partials;
  try {
    partials = en.derive({}, initial, goal, 1);
  } catch (const RuntimeFault& e) {
    out.runtime_error = true;
    out.error = e.what();
    return out;
  }
  std::map<std::string, Result> by_key;
  for (auto& p : partials) {
    auto key = solution_key(p.store, p.witnesses);
    by_key.try_emplace(std::move(key),
                       Result{std::move(p.store), std::move(p.witnesses), std::move(p.node)});
  }
  for (auto& [key, r] : by_key) out.results.push_back(std::move(r));
  return out;
}

std::string solution_key(const Store& store, const WitnessList& witnesses) {
  std::vector<std::pair<std::string, std::string>> w;
  for (const auto& [name, value] : witnesses) w.emplace_back(name, format_term(value));
  return key_of(store, w);
}

std::string EquivalenceReport::describe() const {
  std::string s;
  switch (verdict) {
    case Verdict::Match: s += "match"; break;
    case Verdict::Mismatch: s += "MISMATCH"; break;
    case Verdict::OutOfBounds: s += "out of bounds: " + oracle_error; return s + "\n";
  }
  s += "\n";
  auto list = [&](const char* who, const std::set<std::string>& keys, const std::string& err) {
    s += std::string("  ") + who + ": ";
    if (!err.empty()) {
      s += "error (" + err + ")\n";
      return;
    }
    s += std::to_string(keys.size()) + " solution(s)\n";
    for (const auto& k : keys) s += "    " + k + "\n";
  };
  list("evaluator", evaluator, evaluator_error);
  list("oracle", oracle, oracle_error);
  if (verdict == Verdict::Mismatch) {
    s += "  program:\n" + program_text;
    if (!counterexample.empty()) s += "  minimal counterexample:\n" + counterexample;
  }
  return s;
}

EquivalenceReport check_equivalence(const SourceProgram& program, const OracleBounds& bounds) {
  EquivalenceReport report;
  try {
    report = compare(program, bounds);
    if (report.verdict == EquivalenceReport::Verdict::Mismatch) {
      auto minimal = shrink(program, [&](const SourceProgram& p) {
        return compare(p, bounds).verdict == EquivalenceReport::Verdict::Mismatch;
      });
      report.counterexample = to_source(minimal);
    }
  } catch (const std::exception& e) {
    report.verdict = EquivalenceReport::Verdict::Mismatch;
    report.evaluator_error = std::string("unexpected failure: ") + e.what();
  }
  return report;
}

SourceProgram shrink(const SourceProgram& program,
                     const std::function<bool(const SourceProgram&)>& still_failing) {
  SourceProgram current = program;
  for (int round = 0; round < 10'000; ++round) {
    bool reduced = false;
    for (auto& candidate : program_reductions(current)) {
      if (still_failing(candidate)) {
        current = std::move(candidate);
        reduced = true;
        break;
      }
    }
    if (!reduced) break;
  }
  return current;
}

}  // namespace choo::oracle
