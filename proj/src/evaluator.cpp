#include "choo/evaluator.hpp"

#include <limits>
#include <map>
#include <memory>
#include <utility>

namespace choo {

BudgetExhausted::BudgetExhausted(Limit which, std::uint64_t bound)
    : std::runtime_error(std::string("budget exhausted: ") +
                         (which == Limit::Depth ? "max-depth" : "max-steps") + " (" +
                         std::to_string(bound) + ")"),
      which_(which) {}

// ---------------------------------------------------------------- state

ProgramState::ProgramState(std::vector<Clause> clauses) : clauses_(std::move(clauses)) {
  for (std::size_t i = 0; i < clauses_.size(); ++i) {
    index_[{clauses_[i].name, clauses_[i].params.size()}].push_back(i);
  }
}

const std::vector<std::size_t>* ProgramState::clauses_for(const std::string& name,
                                                          std::size_t arity) const {
  auto it = index_.find({name, arity});
  return it == index_.end() ? nullptr : &it->second;
}

void ProgramState::write(const std::string& name, Term value) {
  if (!is_ground(value)) {
    throw RuntimeError("cannot store a non-ground value in '" + name + "'");
  }
  auto it = store_.find(name);
  std::optional<Term> previous;
  if (it != store_.end()) previous = it->second;
  trail_.emplace_back(StoreWrite{name, std::move(previous)});
  store_.insert_or_assign(name, std::move(value));
}

bool ProgramState::unify(const Term& a, const Term& b) {
  std::vector<VarId> bound;
  const bool ok = unify_in_place(a, b, bindings_, bound);
  for (VarId id : bound) trail_.emplace_back(id);
  return ok;
}

Term ProgramState::fresh_var(const std::string& display_name) {
  return Term::var(next_var_++, display_name);
}

void ProgramState::undo_to(std::size_t mark) {
  while (trail_.size() > mark) {
    auto& entry = trail_.back();
    if (const auto* id = std::get_if<VarId>(&entry)) {
      bindings_.unbind(*id);
    } else {
      auto& w = std::get<StoreWrite>(entry);
      if (w.previous) {
        store_.insert_or_assign(w.name, std::move(*w.previous));
      } else {
        store_.erase(w.name);
      }
    }
    trail_.pop_back();
  }
}

ProgramState::Snapshot ProgramState::snapshot() const {
  return Snapshot{store_, bindings_.sorted_bindings(), trail_.size(), next_var_};
}

// ---------------------------------------------------------------- expressions

std::int64_t fib(std::int64_t n) {
  if (n < 1) throw RuntimeError("fib(" + std::to_string(n) + ") is undefined (needs n >= 1)");
  std::int64_t prev = 0;  // fib(1)
  std::int64_t cur = 1;   // fib(2)
  if (n == 1) return prev;
  for (std::int64_t i = 2; i < n; ++i) {
    std::int64_t next = 0;
    if (__builtin_add_overflow(prev, cur, &next)) {
      throw RuntimeError("integer overflow in fib(" + std::to_string(n) + ")");
    }
    prev = cur;
    cur = next;
  }
  return cur;
}

std::int64_t fact(std::int64_t n) {
  if (n < 0) throw RuntimeError("fact(" + std::to_string(n) + ") is undefined (needs n >= 0)");
  std::int64_t acc = 1;
  for (std::int64_t i = 2; i <= n; ++i) {
    if (__builtin_mul_overflow(acc, i, &acc)) {
      throw RuntimeError("integer overflow in fact(" + std::to_string(n) + ")");
    }
  }
  return acc;
}

namespace {

std::int64_t as_integer(const Term& t, const Substitution& s, const char* context) {
  if (t.is_int()) return t.as_int();
  const Term full = apply(s, t);
  if (!is_ground(full)) {
    throw RuntimeError(std::string("non-ground operand in ") + context + ": " + format_term(full));
  }
  throw RuntimeError(std::string("non-integer operand in ") + context + ": " + format_term(full));
}

std::int64_t arith(ArithOp op, std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  bool overflow = false;
  switch (op) {
    case ArithOp::Add: overflow = __builtin_add_overflow(a, b, &r); break;
    case ArithOp::Sub: overflow = __builtin_sub_overflow(a, b, &r); break;
    case ArithOp::Mul: overflow = __builtin_mul_overflow(a, b, &r); break;
    case ArithOp::Div:
      if (b == 0) throw RuntimeError("division by zero");
      if (a == std::numeric_limits<std::int64_t>::min() && b == -1) {
        overflow = true;
      } else {
        r = a / b;
      }
      break;
  }
  if (overflow) {
    throw RuntimeError("integer overflow in " + std::to_string(a) + " " + to_string(op) + " " +
                       std::to_string(b));
  }
  return r;
}

}  // namespace

EvalResult eval_expr(const ProgramState& state, const Expr& e) {
  return std::visit(
      [&](const auto& n) -> EvalResult {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, IntLit>) {
          return Term::integer(n.value);
        } else if constexpr (std::is_same_v<N, VarRef>) {
          if (n.scope == NameScope::Logic) {
            throw RuntimeError("logic variable '" + n.name + "' is not in scope");
          }
          auto it = state.store().find(n.name);
          if (it == state.store().end()) return std::nullopt;
          return it->second;
        } else if constexpr (std::is_same_v<N, TermLit>) {
          // Only the top is dereferenced; bound variables further down stay
          // as they are, which keeps long chains of terms linear to build.
          return state.bindings().walk(n.term);
        } else if constexpr (std::is_same_v<N, Construct>) {
          std::vector<Term> args;
          for (const auto& a : n.args) {
            auto v = eval_expr(state, *a);
            if (!v) return std::nullopt;
            args.push_back(std::move(*v));
          }
          return Term::compound(n.functor, std::move(args));
        } else if constexpr (std::is_same_v<N, BinOp>) {
          auto l = eval_expr(state, *n.lhs);
          if (!l) return std::nullopt;
          auto r = eval_expr(state, *n.rhs);
          if (!r) return std::nullopt;
          return Term::integer(arith(n.op, as_integer(*l, state.bindings(), "arithmetic"),
                                         as_integer(*r, state.bindings(), "arithmetic")));
        } else {
          auto a = eval_expr(state, *n.arg);
          if (!a) return std::nullopt;
          const std::int64_t v = as_integer(*a, state.bindings(), to_string(n.fn));
          return Term::integer(n.fn == Builtin::Fib ? fib(v) : fact(v));
        }
      },
      e.node);
}

// ---------------------------------------------------------------- search

namespace {

// Goal text with embedded logic variables replaced by their current values.
Expr resolved(const Expr& e, const Substitution& s) {
  return std::visit(
      [&](const auto& n) -> Expr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, TermLit>) {
          return term_lit(apply(s, n.term));
        } else if constexpr (std::is_same_v<N, BinOp>) {
          return binop(n.op, resolved(*n.lhs, s), resolved(*n.rhs, s));
        } else if constexpr (std::is_same_v<N, FunCall>) {
          return builtin(n.fn, resolved(*n.arg, s));
        } else if constexpr (std::is_same_v<N, Construct>) {
          std::vector<Expr> args;
          for (const auto& a : n.args) args.push_back(resolved(*a, s));
          return construct(n.functor, std::move(args));
        } else {
          return e;
        }
      },
      e.node);
}

Goal resolved(const Goal& g, const Substitution& s) {
  return std::visit(
      [&](const auto& n) -> Goal {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Call>) {
          std::vector<Expr> args;
          for (const auto& a : n.args) args.push_back(resolved(a, s));
          return call(n.name, std::move(args));
        } else if constexpr (std::is_same_v<N, Cond>) {
          return cond(n.condition.op, resolved(n.condition.lhs, s), resolved(n.condition.rhs, s));
        } else if constexpr (std::is_same_v<N, Assign>) {
          return assign(n.target, resolved(n.value, s));
        } else if constexpr (std::is_same_v<N, Seq>) {
          return seq(resolved(*n.first, s), resolved(*n.second, s));
        } else if constexpr (std::is_same_v<N, Choose>) {
          return choose(n.var, resolved(*n.body, s));
        } else {
          return bounded_choose(n.var, n.set, resolved(*n.body, s));
        }
      },
      g.node);
}

struct ContNode;
using Cont = std::shared_ptr<const ContNode>;

// Goals still to run, innermost first. Persistent so choice points can
// capture it without copying.
struct ContNode {
  Goal goal;
  std::uint64_t depth;
  Cont next;
};

Cont push(Goal g, std::uint64_t depth, Cont next) {
  return std::make_shared<const ContNode>(ContNode{std::move(g), depth, std::move(next)});
}

struct ClauseAlternatives {
  const std::vector<std::size_t>* clauses;
  std::size_t next;
  std::string name;
  std::vector<Term> args;
};

struct ElementAlternatives {
  std::vector<Term> elements;
  std::size_t next;
};

struct RangeAlternatives {
  std::int64_t next;
  std::int64_t hi;
  bool done;
};

struct ChoicePoint {
  Cont rest;
  std::uint64_t depth;
  std::size_t trail_mark;
  std::size_t witness_mark;
  std::size_t log_mark;
  VarId var_mark;
  // Set alternatives only.
  std::string var;
  std::optional<Box<Goal>> body;
  std::string goal_text;
  std::variant<ClauseAlternatives, ElementAlternatives, RangeAlternatives> alts;
};

struct Entered {
  std::string name;
  Term value;  // the element, or the fresh variable for unbounded choice
};

class Engine {
public:
  Engine(ProgramState& state, const ExecOptions& options,
         const std::function<SearchControl(const Outcome&)>& on_outcome)
      : state_(state), options_(options), on_outcome_(on_outcome) {}

  void run(const Goal& goal) {
    cont_ = push(goal, 1, nullptr);
    while (true) {
      if (!cont_) {
        if (emit() == SearchControl::Stop) return;
        if (!backtrack()) return;
        continue;
      }
      Cont frame = cont_;
      cont_ = frame->next;
      if (!dispatch(frame->goal, frame->depth) && !backtrack()) return;
    }
  }

private:
  bool verbose() const { return options_.record_derivations || options_.trace; }

  void count_step(std::uint64_t depth) {
    if (depth > options_.budget.max_depth) {
      throw BudgetExhausted(BudgetExhausted::Limit::Depth, options_.budget.max_depth);
    }
    if (++steps_ > options_.budget.max_steps) {
      throw BudgetExhausted(BudgetExhausted::Limit::Steps, options_.budget.max_steps);
    }
  }

  void note(Rule rule, std::uint64_t depth, const std::string& text) {
    if (options_.record_derivations) log_.push_back({depth, rule, text});
    if (options_.trace) {
      options_.trace(TraceEvent{TraceEvent::Kind::Rule, rule_number(rule), depth, text});
    }
  }

  bool failed(std::uint64_t depth, const Goal& g) {
    if (options_.trace) {
      options_.trace(TraceEvent{TraceEvent::Kind::Fail, 0, depth, shown(g)});
    }
    return false;
  }

  std::string shown(const Goal& g) const { return to_source(resolved(g, state_.bindings())); }
  std::string shown(const Term& t) const { return to_source(term_lit(apply(state_.bindings(), t))); }

  static std::string judgment(const std::string& goal_text) { return "ex(P, " + goal_text + ")"; }

  bool dispatch(const Goal& g, std::uint64_t depth) {
    return std::visit([&](const auto& n) { return exec(n, g, depth); }, g.node);
  }

  // Rule 4.
  bool exec(const Cond& n, const Goal& g, std::uint64_t depth) {
    count_step(depth);
    if (verbose()) note(Rule::Condition, depth, judgment(shown(g)));
    const auto& c = n.condition;
    auto l = eval_expr(state_, c.lhs);
    if (!l) return failed(depth, g);
    auto r = eval_expr(state_, c.rhs);
    if (!r) return failed(depth, g);
    bool holds = false;
    if (c.op == RelOp::Eq) {
      holds = state_.unify(*l, *r);
    } else {
      const std::int64_t a = as_integer(*l, state_.bindings(), to_string(c.op));
      const std::int64_t b = as_integer(*r, state_.bindings(), to_string(c.op));
      switch (c.op) {
        case RelOp::Neq: holds = a != b; break;
        case RelOp::Lt: holds = a < b; break;
        case RelOp::Le: holds = a <= b; break;
        case RelOp::Gt: holds = a > b; break;
        case RelOp::Ge: holds = a >= b; break;
        case RelOp::Eq: break;
      }
    }
    return holds || failed(depth, g);
  }

  // Rule 5. An existing binding for the target is replaced.
  bool exec(const Assign& n, const Goal& g, std::uint64_t depth) {
    count_step(depth);
    if (verbose()) note(Rule::Assignment, depth, judgment(shown(g)));
    auto v = eval_expr(state_, n.value);
    if (!v) return failed(depth, g);
    state_.write(n.target, apply(state_.bindings(), *v));
    return true;
  }

  // Rule 6.
  bool exec(const Seq& n, const Goal& g, std::uint64_t depth) {
    count_step(depth);
    if (verbose()) note(Rule::Sequence, depth, judgment(shown(g)));
    cont_ = push(*n.first, depth + 1, push(*n.second, depth + 1, std::move(cont_)));
    return true;
  }

  // Rule 7: the witness is whatever unification later binds the fresh
  // variable to.
  bool exec(const Choose& n, const Goal& g, std::uint64_t depth) {
    count_step(depth);
    if (verbose()) note(Rule::Choose, depth, judgment(shown(g)));
    Term v = state_.fresh_var(n.var);
    entered_.push_back({n.var, v});
    cont_ = push(subst_goal(*n.body, n.var, v), depth + 1, std::move(cont_));
    return true;
  }

  // Rule 8.
  bool exec(const BoundedChoose& n, const Goal& g, std::uint64_t depth) {
    ChoicePoint cp = make_choice_point(depth);
    cp.var = n.var;
    cp.body = n.body;
    if (verbose()) cp.goal_text = shown(g);
    if (const auto* r = std::get_if<RangeSet>(&n.set.node)) {
      if (r->lo > r->hi) {
        count_step(depth);
        return failed(depth, g);
      }
      cp.alts = RangeAlternatives{r->lo, r->hi, false};
    } else {
      auto elems = distinct_elements(std::get<EnumSet>(n.set.node));
      if (elems.empty()) {
        count_step(depth);
        return failed(depth, g);
      }
      cp.alts = ElementAlternatives{std::move(elems), 0};
    }
    choice_points_.push_back(std::move(cp));
    return next_alternative(choice_points_.back());
  }

  // Rules 3, 2 and 1.
  bool exec(const Call& n, const Goal& g, std::uint64_t depth) {
    const auto* clauses = state_.clauses_for(n.name, n.args.size());
    if (!clauses) {
      throw UndefinedProcedure("undefined procedure " + n.name + "/" +
                               std::to_string(n.args.size()));
    }
    std::vector<Term> args;
    for (const auto& a : n.args) {
      auto v = eval_expr(state_, a);
      if (!v) {
        count_step(depth);
        return failed(depth, g);
      }
      args.push_back(std::move(*v));
    }
    ChoicePoint cp = make_choice_point(depth);
    cp.alts = ClauseAlternatives{clauses, 0, n.name, std::move(args)};
    choice_points_.push_back(std::move(cp));
    return next_alternative(choice_points_.back());
  }

  ChoicePoint make_choice_point(std::uint64_t depth) {
    return ChoicePoint{cont_,
                       depth,
                       state_.mark(),
                       entered_.size(),
                       log_.size(),
                       state_.next_var_id(),
                       {},
                       std::nullopt,
                       {},
                       ElementAlternatives{}};
  }

  std::string call_text(const ClauseAlternatives& alts) const {
    std::string s = alts.name + "(";
    for (std::size_t i = 0; i < alts.args.size(); ++i) {
      if (i) s += ", ";
      s += shown(alts.args[i]);
    }
    return s + ")";
  }

  bool enter_element(ChoicePoint& cp, const Term& t) {
    count_step(cp.depth);
    if (verbose()) {
      note(Rule::BoundedChoose, cp.depth,
           judgment(cp.goal_text) + " with " + cp.var + " := " + shown(t));
    }
    entered_.push_back({cp.var, t});
    cont_ = push(subst_goal(**cp.body, cp.var, t), cp.depth + 1, cp.rest);
    return true;
  }

  bool enter_clause(ChoicePoint& cp, ClauseAlternatives& alts, const Clause& clause) {
    const std::uint64_t d = cp.depth;
    count_step(d);
    const std::string call = verbose() ? call_text(alts) : std::string{};
    if (verbose()) note(Rule::CallClause, d, judgment(call));
    Goal body = clause.body;
    std::vector<std::string> params = clause.params;
    for (std::size_t i = 0; i < clause.params.size(); ++i) {
      const std::uint64_t di = d + 1 + i;
      count_step(di);
      if (verbose()) {
        note(Rule::Instantiate, di,
             "ex(forall " + clause.params[i] + " D;P, " + call + ") with " + clause.params[i] +
                 " := " + shown(alts.args[i]));
      }
      body = subst_goal(body, clause.params[i], alts.args[i]);
      if (verbose()) params[i] = shown(alts.args[i]);
    }
    const std::uint64_t db = d + 1 + clause.params.size();
    count_step(db);
    if (verbose()) {
      std::string head = clause.name + "(";
      for (std::size_t i = 0; i < params.size(); ++i) head += (i ? ", " : "") + params[i];
      note(Rule::Backchain, db, "ex(" + head + ") = " + shown(body) + ";P, " + call + ")");
    }
    cont_ = push(std::move(body), db + 1, cp.rest);
    return true;
  }

  // Restores the state captured by `cp` and tries its next alternative.
  bool next_alternative(ChoicePoint& cp) {
    while (true) {
      state_.undo_to(cp.trail_mark);
      entered_.erase(entered_.begin() + static_cast<std::ptrdiff_t>(cp.witness_mark), entered_.end());
      log_.resize(cp.log_mark);
      state_.reset_var_counter(cp.var_mark);
      if (auto* e = std::get_if<ElementAlternatives>(&cp.alts)) {
        if (e->next >= e->elements.size()) return false;
        return enter_element(cp, e->elements[e->next++]);
      }
      if (auto* r = std::get_if<RangeAlternatives>(&cp.alts)) {
        if (r->done) return false;
        const std::int64_t t = r->next;
        if (t == r->hi) {
          r->done = true;
        } else {
          ++r->next;
        }
        return enter_element(cp, Term::integer(t));
      }
      auto& c = std::get<ClauseAlternatives>(cp.alts);
      if (c.next >= c.clauses->size()) return false;
      const Clause& clause = state_.clauses()[(*c.clauses)[c.next++]];
      if (enter_clause(cp, c, clause)) return true;
    }
  }

  bool backtrack() {
    while (!choice_points_.empty()) {
      if (next_alternative(choice_points_.back())) return true;
      choice_points_.pop_back();
    }
    return false;
  }

  SearchControl emit() {
    Outcome out;
    out.store = state_.store();
    std::vector<Term> values;
    std::map<VarId, std::size_t> var_uses;
    for (const auto& w : entered_) {
      values.push_back(apply(state_.bindings(), w.value));
      count_var_uses(values.back(), var_uses);
    }
    for (std::size_t i = 0; i < entered_.size(); ++i) {
      const Term& v = values[i];
      const bool unconstrained = v.is_var() && var_uses[v.as_var().id] == 1;
      out.witnesses.push_back(
          {entered_[i].name, unconstrained ? std::nullopt : std::optional<Term>(v)});
    }
    if (options_.record_derivations && !log_.empty()) out.derivation = build_tree(log_);
    return on_outcome_(out);
  }

  static void count_var_uses(const Term& t, std::map<VarId, std::size_t>& uses) {
    if (t.is_var()) {
      ++uses[t.as_var().id];
    } else if (t.is_compound()) {
      for (const auto& a : t.as_compound().args) count_var_uses(a, uses);
    }
  }

  ProgramState& state_;
  const ExecOptions& options_;
  const std::function<SearchControl(const Outcome&)>& on_outcome_;
  Cont cont_;
  std::vector<ChoicePoint> choice_points_;
  std::vector<Entered> entered_;
  std::vector<DerivationStep> log_;
  std::uint64_t steps_ = 0;
};

// Puts the state back the way it was, however the search ends.
class RestoreOnExit {
public:
  explicit RestoreOnExit(ProgramState& s) : s_(s), mark_(s.mark()), next_var_(s.next_var_id()) {}
  ~RestoreOnExit() {
    s_.undo_to(mark_);
    s_.reset_var_counter(next_var_);
  }
  RestoreOnExit(const RestoreOnExit&) = delete;
  RestoreOnExit& operator=(const RestoreOnExit&) = delete;

private:
  ProgramState& s_;
  std::size_t mark_;
  VarId next_var_;
};

}  // namespace

void execute(ProgramState& state, const Goal& goal, const ExecOptions& options,
             const std::function<SearchControl(const Outcome&)>& on_outcome) {
  RestoreOnExit restore(state);
  Engine(state, options, on_outcome).run(goal);
}

std::vector<Outcome> execute_all(ProgramState& state, const Goal& goal,
                                 const ExecOptions& options) {
  std::vector<Outcome> out;
  execute(state, goal, options, [&](const Outcome& o) {
    out.push_back(o);
    return SearchControl::Continue;
  });
  return out;
}

std::optional<Outcome> execute_first(ProgramState& state, const Goal& goal,
                                     const ExecOptions& options) {
  std::optional<Outcome> out;
  execute(state, goal, options, [&](const Outcome& o) {
    out = o;
    return SearchControl::Stop;
  });
  return out;
}

}  // namespace choo
